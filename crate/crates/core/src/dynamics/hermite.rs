//! Matrix elements of ∫₀ᵗ V_s ds in the Hermite basis for H₀ = P² + Q².

use num_complex::Complex64;
use serde::Serialize;

use super::potential::Potential;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::quad::{gauss_hermite, gauss_legendre, hermite_functions, hermite_polys};

/// Overlaps use Gauss–Hermite with `nodes` points, or for compactly supported V
/// composite 16-point Gauss–Legendre with `panels` panels on the support. A
/// second rule with 3/4 of the resolution gives the error estimate.
#[derive(Debug, Clone)]
pub struct HermiteConfig {
    pub nodes: usize,
    pub panels: usize,
    pub tol: f64,
}

impl Default for HermiteConfig {
    fn default() -> Self {
        HermiteConfig {
            nodes: 320,
            panels: 64,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HermiteElements {
    /// C_{mn} for 0 ≤ m, n < M.
    pub matrix: CMat,
    /// (Φ_m, V(√2Q)Φ_n).
    pub overlaps: nalgebra::DMatrix<f64>,
    pub quad_error: f64,
    pub flagged: bool,
}

/// ‖e^{−Q²/2}Φ_n‖² = (1/√2)(2n)!/(2^{2n}(n!)²), by the ratio (2n−1)/(2n).
pub fn weighted_norm_sq(n: usize) -> f64 {
    let mut a = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=n {
        a *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    a
}

/// ∫ e^{−x²} ψ_n(x)² dx by Gauss–Hermite after x = y/√2; exact for n + 1 ≤ nodes.
pub fn weighted_norm_sq_quadrature(n: usize, nodes: usize) -> f64 {
    let gh = gauss_hermite(nodes);
    gh.nodes
        .iter()
        .zip(&gh.weights)
        .map(|(&y, &w)| {
            let h = hermite_polys(n, y / std::f64::consts::SQRT_2)[n];
            w * h * h
        })
        .sum::<f64>()
        / std::f64::consts::SQRT_2
}

/// Quadrature points x_k and weights w_k for ∫ g(x) dx with g decaying like e^{−x²}.
fn rule(pot: &Potential, nodes: usize, panels: usize) -> (Vec<f64>, Vec<f64>) {
    match pot.support_radius() {
        Some(r) => {
            let half = r / std::f64::consts::SQRT_2;
            let (x, w) = gauss_legendre(16);
            let h = 2.0 * half / panels as f64;
            let mut xs = Vec::with_capacity(16 * panels);
            let mut ws = Vec::with_capacity(16 * panels);
            for p in 0..panels {
                let mid = -half + (p as f64 + 0.5) * h;
                for (xi, wi) in x.iter().zip(&w) {
                    xs.push(mid + 0.5 * h * xi);
                    ws.push(0.5 * h * wi);
                }
            }
            (xs, ws)
        }
        None => {
            let gh = gauss_hermite(nodes);
            (gh.nodes, gh.scaled_weights)
        }
    }
}

fn overlaps(pot: &Potential, m: usize, nodes: usize, panels: usize) -> nalgebra::DMatrix<f64> {
    let (xs, ws) = rule(pot, nodes, panels);
    let mut out = nalgebra::DMatrix::zeros(m, m);
    for (&x, &sw) in xs.iter().zip(&ws) {
        let v = pot.value(std::f64::consts::SQRT_2 * x);
        if v == 0.0 {
            continue;
        }
        let psi = hermite_functions(m - 1, x);
        for i in 0..m {
            let a = sw * v * psi[i];
            for j in 0..m {
                out[(i, j)] += a * psi[j];
            }
        }
    }
    out
}

/// (e^{2it(m−n)} − 1)/(2i(m−n)), or t on the diagonal.
pub fn time_factor(m: usize, n: usize, t: f64) -> Complex64 {
    if m == n {
        return c(t, 0.0);
    }
    let d = m as f64 - n as f64;
    (Complex64::from_polar(1.0, 2.0 * t * d) - 1.0) / c(0.0, 2.0 * d)
}

/// C_{mn} = time_factor(m, n, t)·(Φ_m, V(√2Q)Φ_n) for m, n < M.
pub fn hermite_matrix_elements(
    pot: &Potential,
    t: f64,
    m: usize,
    cfg: &HermiteConfig,
) -> Result<HermiteElements> {
    if m < 2 {
        return Err(Error::InvalidArgument("cutoff M must be at least 2".into()));
    }
    pot.validate()?;
    if cfg.nodes < m + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} nodes cannot resolve {m} Hermite functions",
            cfg.nodes
        )));
    }
    let fine = overlaps(pot, m, cfg.nodes, cfg.panels);
    let coarse = overlaps(
        pot,
        m,
        (3 * cfg.nodes / 4).max(m + 1),
        (3 * cfg.panels / 4).max(1),
    );
    let quad_error = (&fine - &coarse).amax();
    let matrix = CMat::from_fn(m, m, |i, j| time_factor(i, j, t) * fine[(i, j)]);
    Ok(HermiteElements {
        matrix,
        overlaps: fine,
        quad_error,
        flagged: quad_error > cfg.tol,
    })
}

/// K = sup_x |V(√2x)| e^{x²} for compactly supported V, by a grid scan refined
/// around the best point.
pub fn weight_constant(pot: &Potential) -> Result<f64> {
    let r = pot.support_radius().ok_or_else(|| {
        Error::InvalidArgument("K is finite only for compactly supported V".into())
    })?;
    let half = r / std::f64::consts::SQRT_2;
    let g = |x: f64| pot.value(std::f64::consts::SQRT_2 * x).abs() * (x * x).exp();
    let n = 4000;
    let h = 2.0 * half / n as f64;
    let (mut best_x, mut best) = (0.0, 0.0);
    for k in 0..=n {
        let x = -half + k as f64 * h;
        let v = g(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    // golden-section refinement on the bracketing cells
    let (mut a, mut b) = (best_x - h, best_x + h);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if g(x1) > g(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    Ok(best.max(g(0.5 * (a + b))))
}

/// The bound table for |C_{mn}|.
pub fn matrix_element_bound(m: usize, n: usize, t: f64, k: f64) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    match (m, n) {
        (0, 0) => t.abs() * k,
        _ if m == n => t.abs() * k / nf.sqrt(),
        (0, _) => k / nf.powf(1.25),
        (_, 0) => k / mf.powf(1.25),
        _ => k / (mf.powf(0.25) * nf.powf(0.25) * (mf - nf).abs()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundViolation {
    pub m: usize,
    pub n: usize,
    pub value: f64,
    pub bound: f64,
}

/// Entries of `c` exceeding the bound table by more than `slack`.
pub fn bound_violations(c: &CMat, t: f64, k: f64, slack: f64) -> Vec<BoundViolation> {
    let mut out = Vec::new();
    for m in 0..c.nrows() {
        for n in 0..c.ncols() {
            let value = c[(m, n)].norm();
            let bound = matrix_element_bound(m, n, t, k);
            if value > bound + slack {
                out.push(BoundViolation { m, n, value, bound });
            }
        }
    }
    out
}
