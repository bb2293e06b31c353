//! Dyson series of the interaction-picture cocycle Γ(t) = e^{itH}e^{−itH₀}, H = H₀ + V.
//!
//! Γ solves Γ' = iΓV_t with V_t = e^{itH₀}Ve^{−itH₀}; the order-n term is
//! Γ_n(τ) = i∫₀^τ Γ_{n−1}(s)V_s ds. Each term is integrated on Gauss–Legendre
//! panels with the spectral integration matrix, in the eigenbasis of H₀.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_defect, op_norm, CMat, HermEig};
use crate::quad::{gauss_legendre, spectral_integration_matrix};

const NODES: usize = 16;

#[derive(Debug, Clone)]
pub struct DysonConfig {
    /// Panels on [0, t]; chosen from the spectral spread of H₀ when None.
    pub panels: Option<usize>,
    /// The tail bound above which the result is flagged.
    pub tail_tol: f64,
}

impl Default for DysonConfig {
    fn default() -> Self {
        DysonConfig {
            panels: None,
            tail_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DysonResult {
    /// Partial sum Σ_{n≤K} Γ_n(t).
    pub matrix: CMat,
    /// Σ_{n>K} (|t|‖V‖)ⁿ/n!.
    pub tail_bound: f64,
    /// Difference to the same sum on twice as many panels.
    pub quad_error: f64,
    pub panels: usize,
    pub flagged: bool,
}

/// Σ_{n>K} xⁿ/n! summed directly from n = K+1.
pub fn exp_tail(x: f64, order: usize) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for n in 1..=order + 1 {
        term *= x / n as f64;
    }
    let mut sum = 0.0;
    let mut n = order + 1;
    while term > 1e-17 * sum || (n as f64) < x {
        sum += term;
        n += 1;
        term *= x / n as f64;
        if !term.is_finite() || n > 100_000 {
            return f64::INFINITY;
        }
    }
    sum
}

/// ‖V₁ − V₂‖ (e^{|t|(‖V₁‖+‖V₂‖)} − 1)/(‖V₁‖+‖V₂‖), with the limit |t|‖V₁ − V₂‖ at zero norms.
pub fn continuity_bound(diff_norm: f64, norm1: f64, norm2: f64, t: f64) -> f64 {
    let s = norm1 + norm2;
    if s == 0.0 {
        return diff_norm * t.abs();
    }
    diff_norm * (t.abs() * s).exp_m1() / s
}

fn check_hermitian(m: &CMat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!("{what} must be square")));
    }
    let scale = op_norm(m).max(1.0);
    if hermiticity_defect(m) > 1e-10 * scale {
        return Err(Error::InvalidArgument(format!("{what} must be Hermitian")));
    }
    Ok(())
}

/// e^{itH}e^{−itH₀} by eigendecomposition.
pub fn exact_cocycle(h0: &CMat, v: &CMat, t: f64) -> Result<CMat> {
    check_hermitian(h0, "H0")?;
    check_hermitian(v, "V")?;
    let h = h0 + v;
    let u = HermEig::new(&h).apply_fn(|x| Complex64::from_polar(1.0, t * x));
    let u0 = HermEig::new(h0).apply_fn(|x| Complex64::from_polar(1.0, -t * x));
    Ok(u * u0)
}

fn partial_sum(vt: &CMat, evals: &[f64], t: f64, order: usize, panels: usize) -> CMat {
    let d = evals.len();
    let (x, w) = gauss_legendre(NODES);
    let smat = spectral_integration_matrix(&x, &w);
    let h = t / panels as f64;
    // V_s in the eigenbasis: entries Ṽ_jk e^{is(λ_j − λ_k)}.
    let v_at = |s: f64| {
        CMat::from_fn(d, d, |j, k| {
            vt[(j, k)] * Complex64::from_polar(1.0, s * (evals[j] - evals[k]))
        })
    };
    let mut nodes_v = Vec::with_capacity(panels * NODES);
    for p in 0..panels {
        for xi in &x {
            nodes_v.push(v_at(h * (p as f64 + 0.5 * (xi + 1.0))));
        }
    }
    let id = CMat::identity(d, d);
    let mut total = id.clone();
    // Γ_{n−1} at the nodes; Γ₀ = 𝟙.
    let mut prev: Vec<CMat> = vec![id.clone(); panels * NODES];
    let ic = c(0.0, 1.0);
    for _ in 1..=order {
        let integrand: Vec<CMat> = prev.iter().zip(&nodes_v).map(|(g, v)| g * v * ic).collect();
        let mut next = Vec::with_capacity(prev.len());
        let mut start = CMat::zeros(d, d);
        for p in 0..panels {
            let block = &integrand[p * NODES..(p + 1) * NODES];
            for j in 0..NODES {
                let mut acc = start.clone();
                for (k, f) in block.iter().enumerate() {
                    acc += f * c(0.5 * h * smat[(j, k)], 0.0);
                }
                next.push(acc);
            }
            for (k, f) in block.iter().enumerate() {
                start += f * c(0.5 * h * w[k], 0.0);
            }
        }
        total += &start;
        prev = next;
    }
    total
}

/// Partial Dyson sum of order K with quadrature and tail diagnostics.
pub fn dyson_cocycle(
    h0: &CMat,
    v: &CMat,
    t: f64,
    order: usize,
    cfg: &DysonConfig,
) -> Result<DysonResult> {
    check_hermitian(h0, "H0")?;
    check_hermitian(v, "V")?;
    if h0.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch {
            expected: h0.nrows(),
            got: v.nrows(),
        });
    }
    let d = h0.nrows();
    let vnorm = op_norm(v);
    let tail_bound = exp_tail(t * vnorm, order);
    if t == 0.0 || vnorm == 0.0 || order == 0 {
        return Ok(DysonResult {
            matrix: CMat::identity(d, d),
            tail_bound,
            quad_error: 0.0,
            panels: 0,
            flagged: tail_bound > cfg.tail_tol,
        });
    }
    let eig = HermEig::new(h0);
    let spread = eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    let panels = cfg
        .panels
        .unwrap_or_else(|| ((t.abs() * (spread + vnorm)) / 6.0).ceil().max(1.0) as usize);
    let vt = eig.vectors.adjoint() * v * &eig.vectors;
    let coarse = partial_sum(&vt, &eig.values, t, order, panels);
    let fine = partial_sum(&vt, &eig.values, t, order, 2 * panels);
    let quad_error = op_norm(&(&fine - &coarse));
    let matrix = &eig.vectors * fine * eig.vectors.adjoint();
    Ok(DysonResult {
        matrix,
        tail_bound,
        quad_error,
        panels: 2 * panels,
        flagged: tail_bound > cfg.tail_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_herm(d: usize, scale: f64, rng: &mut ChaCha8Rng) -> CMat {
        let a = CMat::from_fn(d, d, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        let n = op_norm(&h);
        h * c(scale / n, 0.0)
    }

    fn h0(d: usize) -> CMat {
        CMat::from_fn(d, d, |i, j| {
            if i == j {
                c(2.0 * i as f64 + 1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn zero_potential_gives_identity() {
        let r =
            dyson_cocycle(&h0(5), &CMat::zeros(5, 5), 1.0, 10, &DysonConfig::default()).unwrap();
        assert_eq!(r.matrix, CMat::identity(5, 5));
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn matches_exact_cocycle_within_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = random_herm(6, 0.8, &mut rng);
        let t = 1.2;
        let r = dyson_cocycle(&h0(6), &v, t, 20, &DysonConfig::default()).unwrap();
        let exact = exact_cocycle(&h0(6), &v, t).unwrap();
        let err = op_norm(&(&r.matrix - &exact));
        assert!(
            err <= r.tail_bound + r.quad_error + 1e-12,
            "{err} vs {} + {}",
            r.tail_bound,
            r.quad_error
        );
        assert!(err < 1e-10);
    }

    #[test]
    fn unitarity_defect_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = random_herm(5, 1.0, &mut rng);
        for order in [3, 6, 12] {
            let r = dyson_cocycle(&h0(5), &v, 0.9, order, &DysonConfig::default()).unwrap();
            let defect = op_norm(&(&r.matrix * r.matrix.adjoint() - CMat::identity(5, 5)));
            let bound = 2.0 * (r.tail_bound + r.quad_error) + (r.tail_bound + r.quad_error).powi(2);
            assert!(defect <= bound + 1e-12, "order {order}: {defect} > {bound}");
        }
    }

    #[test]
    fn continuity_in_potential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let v1 = random_herm(5, rng.gen_range(0.1..1.0), &mut rng);
            let v2 = random_herm(5, rng.gen_range(0.1..1.0), &mut rng);
            let t = rng.gen_range(-1.5..1.5);
            let g1 = exact_cocycle(&h0(5), &v1, t).unwrap();
            let g2 = exact_cocycle(&h0(5), &v2, t).unwrap();
            let lhs = op_norm(&(g1 - g2));
            let rhs = continuity_bound(op_norm(&(&v1 - &v2)), op_norm(&v1), op_norm(&v2), t);
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn tail_values() {
        assert!((exp_tail(1.0, 0) - (1f64.exp() - 1.0)).abs() < 1e-15);
        assert!((exp_tail(2.0, 3) - (2f64.exp() - 1.0 - 2.0 - 2.0 - 4.0 / 3.0)).abs() < 1e-14);
        assert_eq!(exp_tail(0.0, 4), 0.0);
        assert!(exp_tail(0.5, 20) < 1e-25);
    }

    #[test]
    fn flags_large_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = random_herm(4, 3.0, &mut rng);
        let r = dyson_cocycle(&h0(4), &v, 2.0, 4, &DysonConfig::default()).unwrap();
        assert!(r.flagged);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat::zeros(3, 3);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(dyson_cocycle(&h0(3), &m, 1.0, 3, &DysonConfig::default()).is_err());
    }
}
