//! Momentum-space kernel of ∫₀ᵗ V_s ds for the free evolution H₀ = P².

use num_complex::Complex64;

use super::potential::{inv_sqrt_2pi, Potential};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::quad;

/// (1 − e^{ity}) / y written as (2 sin²(ty/2) − i sin(ty)) / y, with limit −it at y = 0.
fn phase_quotient(t: f64, y: f64) -> Complex64 {
    if y == 0.0 {
        return c(0.0, -t);
    }
    let a = t * y;
    if a.abs() < 1e-8 {
        // Second-order expansion: −it + t²y/2.
        return c(t * a / 2.0, -t);
    }
    let s = (a / 2.0).sin();
    c(2.0 * s * s / y, -a.sin() / y)
}

/// The kernel (u, v) ↦ (i/√(2π)) (1 − e^{it(u²−v²)})/(u²−v²) · Ṽ(u−v).
pub fn cocycle_kernel(pot: &Potential, t: f64) -> Result<impl Fn(f64, f64) -> Complex64 + '_> {
    pot.require_mean_zero()?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite".into()));
    }
    let pref = c(0.0, inv_sqrt_2pi());
    Ok(move |u: f64, v: f64| {
        let vt = pot.fourier(u - v).unwrap_or_default();
        pref * phase_quotient(t, (u - v) * (u + v)) * vt
    })
}

#[derive(Debug, Clone, Copy)]
pub struct HsNorm {
    pub value: f64,
    pub error: f64,
}

/// Doubling intervals [0,1], [1,2], [2,4], … until a piece is negligible.
fn half_line<F: FnMut(f64) -> f64>(mut f: F, tol: f64) -> Result<HsNorm> {
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut value, mut error) = (0.0, 0.0);
    for _ in 0..60 {
        let r = quad::adaptive(&mut f, lo, hi, tol * 1e-2, 1e-12, 2000);
        if !r.converged {
            return Err(Error::Quadrature {
                estimate: r.error,
                target: tol,
            });
        }
        value += r.value;
        error += r.error;
        if hi >= 8.0 && r.value.abs() <= tol * 1e-3 * value.abs().max(1e-300) {
            return Ok(HsNorm { value, error });
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::Quadrature {
        estimate: f64::INFINITY,
        target: tol,
    })
}

/// ‖∫₀ᵗ V_s ds‖₂² = |t| ∫ |Ṽ(w)|² / (2|w|) dw by 1-D adaptive quadrature.
pub fn cocycle_hs_norm_sq(pot: &Potential, t: f64) -> Result<HsNorm> {
    pot.require_mean_zero()?;
    if t == 0.0 {
        return Ok(HsNorm {
            value: 0.0,
            error: 0.0,
        });
    }
    let g = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        let (a, b) = (
            pot.fourier(w).unwrap().norm_sqr(),
            pot.fourier(-w).unwrap().norm_sqr(),
        );
        (a + b) / (2.0 * w)
    };
    let r = half_line(g, 1e-12)?;
    Ok(HsNorm {
        value: t.abs() * r.value,
        error: t.abs() * r.error,
    })
}

/// The same norm from a 2-D quadrature of |kernel(u,v)|² in the coordinates
/// w = u − v, s = u + v (du dv = ½ dw ds). The s-integral runs to S = 400/|tw|
/// and the remainder uses the averaged tail 4/(w²S) of 4 sin²(tws/2)/(ws)².
pub fn cocycle_hs_norm_sq_2d(pot: &Potential, t: f64) -> Result<HsNorm> {
    let kernel = cocycle_kernel(pot, t)?;
    if t == 0.0 {
        return Ok(HsNorm {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut inner_err: f64 = 0.0;
    let mut failed = None;
    let outer = |w: f64| -> f64 {
        if w == 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        for w in [w, -w] {
            let big_s = 400.0 / (t * w).abs();
            // Even in s; integrate over [0, S] and double.
            let f = |s: f64| kernel((s + w) / 2.0, (s - w) / 2.0).norm_sqr();
            let r = quad::adaptive(f, 0.0, big_s, 1e-14, 1e-9, 20_000);
            if !r.converged {
                failed = Some(r.error);
            }
            inner_err = inner_err.max(r.error);
            let vt = pot.fourier(w).unwrap().norm_sqr() * inv_sqrt_2pi() * inv_sqrt_2pi();
            let tail = vt * 4.0 / (w * w * big_s);
            total += 0.5 * (2.0 * r.value + tail);
        }
        total
    };
    let r = half_line(outer, 1e-9)?;
    if let Some(e) = failed {
        return Err(Error::Quadrature {
            estimate: e,
            target: 1e-9,
        });
    }
    Ok(HsNorm {
        value: r.value,
        error: r.error + inner_err,
    })
}
