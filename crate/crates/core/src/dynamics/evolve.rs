//! Heisenberg evolution of resolvents under a Hermitian matrix Hamiltonian.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockrep::{OperatorMatrix, TruncatedRep};
use crate::linalg::{hermiticity_defect, op_norm, CMat, HermEig};

/// e^{itH}·R(z,f)·e^{−itH}.
pub fn evolved_resolvent(
    rep: &TruncatedRep,
    h: &CMat,
    t: f64,
    z: Complex64,
    f: &[f64],
) -> Result<OperatorMatrix> {
    if h.nrows() != rep.dim() || h.ncols() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            got: h.nrows(),
        });
    }
    if hermiticity_defect(h) > 1e-10 * op_norm(h).max(1.0) {
        return Err(Error::InvalidArgument(
            "Hamiltonian must be Hermitian".into(),
        ));
    }
    let r = rep.resolvent_matrix(z, f)?;
    let u = HermEig::new(h).apply_fn(|x| Complex64::from_polar(1.0, t * x));
    Ok(&u * r * u.adjoint())
}

/// Σ_l (P_l² + Q_l²) in the truncated representation.
pub fn oscillator_hamiltonian(rep: &TruncatedRep) -> CMat {
    let mut h = CMat::zeros(rep.dim(), rep.dim());
    for l in 0..rep.modes() {
        let (q, p) = (rep.q_matrix(l), rep.p_matrix(l));
        h += &q * &q + &p * &p;
    }
    h
}

/// Eigenvalues of the truncated single-mode P² − Q², ascending. They spread over
/// a symmetric interval that widens with the cutoff instead of settling to a
/// discrete spectrum bounded below.
pub fn inverted_oscillator_spectrum(cutoff: usize) -> Vec<f64> {
    let rep = TruncatedRep::standard(1, cutoff);
    let (q, p) = (rep.q_matrix(0), rep.p_matrix(0));
    let mut v = HermEig::new(&(&p * &p - &q * &q)).values;
    v.sort_by(f64::total_cmp);
    v
}

/// Counts of `values` in `bins` equal-width bins over [lo, hi].
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let mut out = vec![0; bins];
    for &v in values {
        if v >= lo && v <= hi {
            let k = (((v - lo) / (hi - lo)) * bins as f64) as usize;
            out[k.min(bins - 1)] += 1;
        }
    }
    out
}
