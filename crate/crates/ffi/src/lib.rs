//! C ABI for resalg.
//!
//! Objects are opaque handles created by `*_new`/`*_from_*` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`ResalgStatus`]; on failure a message is kept per thread and can be read
//! with [`resalg_last_error`]. Strings returned by the library are owned by the
//! caller and released with [`resalg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use resalg::cli::{run_config, Command, Overrides};
use resalg::fockrep::TruncatedRep;
use resalg::linalg::{c, op_norm};
use resalg::resolvsym::{poly_from_str, poly_to_json, simplify, Poly, SimplifyOptions, Q};
use resalg::symplin::{canonical_gram_defect, rat, symplectic_basis, ExactSpace};
use resalg::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResalgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Parse = 4,
    Numerical = 5,
    Budget = 6,
    Panic = 7,
}

/// A symplectic space with exact rational form.
pub struct ResalgSpace(ExactSpace);

/// A resolvent polynomial.
pub struct ResalgPoly(Poly);

/// A truncated Fock representation.
pub struct ResalgRep(TruncatedRep);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let s = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(err: &Error) -> ResalgStatus {
    match err {
        Error::DimensionMismatch { .. } => ResalgStatus::DimensionMismatch,
        Error::Parse(_) => ResalgStatus::Parse,
        Error::Quadrature { .. } | Error::Solver(_) | Error::Divergent(_) => {
            ResalgStatus::Numerical
        }
        Error::Budget(_) => ResalgStatus::Budget,
        _ => ResalgStatus::InvalidArgument,
    }
}

struct Fail(ResalgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ResalgStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ResalgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ResalgStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            ResalgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(ResalgStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .unwrap_or_default()
        .into_raw()
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn resalg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn resalg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn resalg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ------------------------------------------------------------------ spaces

/// The standard space of `modes` degrees of freedom (dimension 2·modes).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn resalg_space_standard(
    modes: usize,
    out_space: *mut *mut ResalgSpace,
) -> ResalgStatus {
    guard(|| {
        let o = out(out_space, "out_space")?;
        if modes == 0 {
            return Err(Fail(
                ResalgStatus::InvalidArgument,
                "modes must be positive".into(),
            ));
        }
        *o = Box::into_raw(Box::new(ResalgSpace(ExactSpace::standard(modes))));
        Ok(())
    })
}

/// A space from a row-major `dim × dim` form with entries num[k]/den[k].
///
/// # Safety
/// `num` and `den` must point to `dim·dim` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn resalg_space_from_form(
    num: *const i64,
    den: *const i64,
    dim: usize,
    out_space: *mut *mut ResalgSpace,
) -> ResalgStatus {
    guard(|| {
        let o = out(out_space, "out_space")?;
        let n = slice(num, dim * dim, "num")?;
        let d = slice(den, dim * dim, "den")?;
        if d.contains(&0) {
            return Err(Fail(
                ResalgStatus::InvalidArgument,
                "zero denominator".into(),
            ));
        }
        let form: Vec<Vec<Q>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| rat(n[i * dim + j], d[i * dim + j]))
                    .collect()
            })
            .collect();
        *o = Box::into_raw(Box::new(ResalgSpace(ExactSpace::new(form)?)));
        Ok(())
    })
}

/// # Safety
/// `space` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn resalg_space_dim(space: *const ResalgSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.dim())
}

/// Builds a symplectic basis exactly and reports max |Gram − J| (0 on success).
///
/// # Safety
/// `space` must be a live handle; `defect` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn resalg_space_basis_defect(
    space: *const ResalgSpace,
    defect: *mut f64,
) -> ResalgStatus {
    guard(|| {
        let s = deref(space, "space")?;
        let o = out(defect, "defect")?;
        let b = symplectic_basis(&s.0)?;
        *o = canonical_gram_defect(&s.0, &b);
        Ok(())
    })
}

/// # Safety
/// `space` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn resalg_space_free(space: *mut ResalgSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

// ------------------------------------------------------------------ polynomials

/// Parses a polynomial from its JSON form.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn resalg_poly_from_json(
    json: *const c_char,
    out_poly: *mut *mut ResalgPoly,
) -> ResalgStatus {
    guard(|| {
        let o = out(out_poly, "out_poly")?;
        let p = poly_from_str(text(json, "json")?)?;
        *o = Box::into_raw(Box::new(ResalgPoly(p)));
        Ok(())
    })
}

/// JSON form of a polynomial; exact rationals as "p/q" strings when `exact` is nonzero.
///
/// # Safety
/// `poly` must be a live handle; `out` must be valid. Free the result with `resalg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn resalg_poly_to_json(
    poly: *const ResalgPoly,
    exact: i32,
    out_json: *mut *mut c_char,
) -> ResalgStatus {
    guard(|| {
        let p = deref(poly, "poly")?;
        let o = out(out_json, "out_json")?;
        *o = c_string(poly_to_json(&p.0, exact != 0).to_string());
        Ok(())
    })
}

/// Number of terms; 0 for the zero polynomial or a null handle.
///
/// # Safety
/// `poly` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn resalg_poly_terms(poly: *const ResalgPoly) -> usize {
    poly.as_ref().map_or(0, |p| p.0.terms().count())
}

/// Rewrites `poly` toward normal form on `space`; a budget of 0 uses the default.
///
/// # Safety
/// Handles must be live; `out_poly` and `is_zero` must be valid.
#[no_mangle]
pub unsafe extern "C" fn resalg_poly_simplify(
    space: *const ResalgSpace,
    poly: *const ResalgPoly,
    budget: usize,
    out_poly: *mut *mut ResalgPoly,
    is_zero: *mut i32,
) -> ResalgStatus {
    guard(|| {
        let s = deref(space, "space")?;
        let p = deref(poly, "poly")?;
        let o = out(out_poly, "out_poly")?;
        let z = out(is_zero, "is_zero")?;
        let mut opts = SimplifyOptions::default();
        if budget > 0 {
            opts.budget = budget;
        }
        let r = simplify(&p.0, &s.0, &opts)?;
        *z = r.poly.is_zero() as i32;
        *o = Box::into_raw(Box::new(ResalgPoly(r.poly)));
        Ok(())
    })
}

/// # Safety
/// `poly` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn resalg_poly_free(poly: *mut ResalgPoly) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

// ------------------------------------------------------------------ representations

/// Truncated Fock representation of the standard space with `cutoff` levels per mode.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn resalg_rep_standard(
    modes: usize,
    cutoff: usize,
    out_rep: *mut *mut ResalgRep,
) -> ResalgStatus {
    guard(|| {
        let o = out(out_rep, "out_rep")?;
        if modes == 0 || cutoff < 2 {
            return Err(Fail(
                ResalgStatus::InvalidArgument,
                "need modes ≥ 1 and cutoff ≥ 2".into(),
            ));
        }
        let dim = (cutoff as u128)
            .checked_pow(modes as u32)
            .unwrap_or(u128::MAX);
        if dim > (1 << 24) {
            return Err(Fail(
                ResalgStatus::Budget,
                format!("Fock dimension {cutoff}^{modes} is too large"),
            ));
        }
        *o = Box::into_raw(Box::new(ResalgRep(TruncatedRep::standard(modes, cutoff))));
        Ok(())
    })
}

/// # Safety
/// `rep` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn resalg_rep_dim(rep: *const ResalgRep) -> usize {
    rep.as_ref().map_or(0, |r| r.0.dim())
}

/// Operator norm of the truncated R(λ, f); `f` has 2·modes coordinates.
///
/// # Safety
/// `rep` must be live; `f` must point to `len` doubles; `norm` must be valid.
#[no_mangle]
pub unsafe extern "C" fn resalg_rep_resolvent_norm(
    rep: *const ResalgRep,
    lambda: f64,
    f: *const f64,
    len: usize,
    norm: *mut f64,
) -> ResalgStatus {
    guard(|| {
        let r = deref(rep, "rep")?;
        let fv = slice(f, len, "f")?;
        let o = out(norm, "norm")?;
        *o = op_norm(&r.0.resolvent_matrix(c(lambda, 0.0), fv)?);
        Ok(())
    })
}

/// Vacuum expectation ⟨Ω, p Ω⟩ in the truncated representation.
///
/// # Safety
/// Handles must be live; `re` and `im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn resalg_rep_vacuum_value(
    rep: *const ResalgRep,
    poly: *const ResalgPoly,
    re: *mut f64,
    im: *mut f64,
) -> ResalgStatus {
    guard(|| {
        let r = deref(rep, "rep")?;
        let p = deref(poly, "poly")?;
        let (ore, oim) = (out(re, "re")?, out(im, "im")?);
        let v = r.0.evaluate_state(&r.0.vacuum(), &p.0)?;
        *ore = v.re;
        *oim = v.im;
        Ok(())
    })
}

/// # Safety
/// `rep` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn resalg_rep_free(rep: *mut ResalgRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

// ------------------------------------------------------------------ suites

/// Runs a verification suite ("relations", "rep", "laplace", "quasifree",
/// "dirac", "cocycle", "lattice", "decompose") on a JSON config and returns
/// the report as JSON. `failures` receives the number of failed records.
///
/// # Safety
/// Strings must be NUL-terminated; out pointers must be valid. Free the report
/// with `resalg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn resalg_run_suite(
    command: *const c_char,
    config_json: *const c_char,
    out_report: *mut *mut c_char,
    failures: *mut usize,
) -> ResalgStatus {
    guard(|| {
        let name = text(command, "command")?;
        let cmd = Command::from_name(name).ok_or_else(|| {
            Fail(
                ResalgStatus::InvalidArgument,
                format!("unknown command '{name}'"),
            )
        })?;
        let doc: serde_json::Value = if config_json.is_null() {
            serde_json::json!({})
        } else {
            serde_json::from_str(text(config_json, "config_json")?)
                .map_err(|e| Fail(ResalgStatus::Parse, e.to_string()))?
        };
        let o = out(out_report, "out_report")?;
        let nf = out(failures, "failures")?;
        let report = run_config(cmd, doc, &Overrides::default())?;
        *nf = report.summary.fail;
        *o = c_string(report.to_json().to_string());
        Ok(())
    })
}
