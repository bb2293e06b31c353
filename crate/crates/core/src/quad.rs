//! Quadrature rules shared by the numeric modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct VecQuadResult {
    pub value: Vec<Complex64>,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_XK[j];
        let s = f(c - x) + f(c + x);
        k += GK_WK[j] * s;
        if j % 2 == 1 {
            g += GK_WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) on a finite interval.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    let (v, e) = gk15(&mut f, a, b);
    let mut ivs = vec![(a, b, v, e)];
    let mut evals = 15;
    loop {
        let total: f64 = ivs.iter().map(|iv| iv.2).sum();
        let err: f64 = ivs.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || ivs.len() >= max_intervals {
            return QuadResult {
                value: total,
                error: err,
                evals,
                converged: err <= abs_tol.max(rel_tol * total.abs()),
            };
        }
        let (i, _) = ivs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = ivs.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evals += 30;
        ivs.push((lo, mid, v1, e1));
        ivs.push((mid, hi, v2, e2));
    }
}

fn gk15_vec<F: FnMut(f64, &mut [Complex64])>(
    f: &mut F,
    a: f64,
    b: f64,
    len: usize,
    buf: &mut [Complex64],
) -> (Vec<Complex64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![Complex64::new(0.0, 0.0); len];
    let mut g = vec![Complex64::new(0.0, 0.0); len];
    f(c, buf);
    for i in 0..len {
        k[i] += buf[i] * GK_WK[7];
        g[i] += buf[i] * GK_WG[3];
    }
    for j in 0..7 {
        let x = h * GK_XK[j];
        for &t in &[c - x, c + x] {
            f(t, buf);
            for i in 0..len {
                k[i] += buf[i] * GK_WK[j];
                if j % 2 == 1 {
                    g[i] += buf[i] * GK_WG[j / 2];
                }
            }
        }
    }
    let mut err = 0.0;
    for i in 0..len {
        err += (k[i] - g[i]).norm_sqr();
        k[i] *= h;
    }
    (k, err.sqrt() * h.abs())
}

/// Vector-valued adaptive Gauss–Kronrod; the error is the Euclidean norm of the
/// Kronrod/Gauss difference summed over intervals.
pub fn adaptive_vec<F: FnMut(f64, &mut [Complex64])>(
    mut f: F,
    len: usize,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> VecQuadResult {
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let (v, e) = gk15_vec(&mut f, a, b, len, &mut buf);
    let mut ivs = vec![(a, b, v, e)];
    let mut evals = 15;
    loop {
        let err: f64 = ivs.iter().map(|iv| iv.3).sum();
        if err <= abs_tol || ivs.len() >= max_intervals {
            let mut value = vec![Complex64::new(0.0, 0.0); len];
            for iv in &ivs {
                for (s, x) in value.iter_mut().zip(&iv.2) {
                    *s += x;
                }
            }
            return VecQuadResult {
                value,
                error: err,
                evals,
                converged: err <= abs_tol,
            };
        }
        let (i, _) = ivs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = ivs.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15_vec(&mut f, lo, mid, len, &mut buf);
        let (v2, e2) = gk15_vec(&mut f, mid, hi, len, &mut buf);
        evals += 30;
        ivs.push((lo, mid, v1, e1));
        ivs.push((mid, hi, v2, e2));
    }
}

/// Legendre polynomial P_n(x) and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        0.5 * n * (n + 1.0) * x.powi(n as i32 + 1)
    } else {
        n * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Matrix A with (A g)_j ≈ ∫_{-1}^{x_j} g for g sampled at the Gauss–Legendre nodes.
pub fn spectral_integration_matrix(x: &[f64], w: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let leg = |m: usize, t: f64| legendre(m, t).0;
    let integral = |m: usize, t: f64| {
        if m == 0 {
            t + 1.0
        } else {
            (leg(m + 1, t) - leg(m - 1, t)) / (2.0 * m as f64 + 1.0)
        }
    };
    DMatrix::from_fn(n, n, |j, k| {
        let mut s = 0.0;
        for m in 0..n {
            s += (2.0 * m as f64 + 1.0) / 2.0 * leg(m, x[k]) * integral(m, x[j]);
        }
        w[k] * s
    })
}

/// Gauss–Hermite rule for the weight e^{-x²}: nodes, weights and scaled weights
/// `w_k e^{x_k²}`. Scaled weights come from the Christoffel sum of Hermite functions,
/// so they stay finite where the plain weights underflow.
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

pub fn gauss_hermite(n: usize) -> GaussHermite {
    let jac = DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 || i == j + 1 {
            ((i.max(j)) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut scaled = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        // one Newton polish on ψ_n
        for _ in 0..3 {
            let psi = hermite_functions(n, *x);
            let dpsi = (2.0 * n as f64).sqrt() * psi[n - 1] - *x * psi[n];
            if dpsi != 0.0 {
                *x -= psi[n] / dpsi;
            }
        }
        let psi = hermite_functions(n - 1, *x);
        let s: f64 = psi.iter().map(|p| p * p).sum();
        scaled.push(1.0 / s);
    }
    let weights = nodes
        .iter()
        .zip(&scaled)
        .map(|(x, s)| s * (-x * x).exp())
        .collect();
    GaussHermite {
        nodes,
        weights,
        scaled_weights: scaled,
    }
}

/// Normalized Hermite functions ψ_0..=ψ_n at x via the stable three-term recurrence.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(p0);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * p0);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Hermite polynomials normalized against e^{-x²}: h_n(x) = ψ_n(x) e^{x²/2}.
pub fn hermite_polys(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(std::f64::consts::PI.powf(-0.25));
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * out[0]);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_polynomials_and_gaussians() {
        let r = adaptive(|x| x.powi(6), 0.0, 1.0, 1e-14, 0.0, 10);
        assert!((r.value - 1.0 / 7.0).abs() < 1e-15);
        let r = adaptive(|x| (-x * x).exp(), -10.0, 10.0, 1e-13, 0.0, 200);
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn gk_vec_matches_scalar() {
        let r = adaptive_vec(
            |t, out| {
                out[0] = Complex64::new(0.0, t).exp();
                out[1] = Complex64::new(t * t, 0.0);
            },
            2,
            0.0,
            3.0,
            1e-13,
            200,
        );
        let exact = (Complex64::new(0.0, 3.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((r.value[0] - exact).norm() < 1e-12);
        assert!((r.value[1].re - 9.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exact_to_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_matrix_integrates_cubic() {
        let (x, w) = gauss_legendre(16);
        let a = spectral_integration_matrix(&x, &w);
        for j in 0..16 {
            let s: f64 = (0..16).map(|k| a[(j, k)] * 3.0 * x[k] * x[k]).sum();
            assert!((s - (x[j].powi(3) + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn gauss_hermite_moments() {
        let gh = gauss_hermite(40);
        let sp = std::f64::consts::PI.sqrt();
        let m0: f64 = gh.weights.iter().sum();
        let m2: f64 = gh
            .nodes
            .iter()
            .zip(&gh.weights)
            .map(|(x, w)| w * x * x)
            .sum();
        let m8: f64 = gh
            .nodes
            .iter()
            .zip(&gh.weights)
            .map(|(x, w)| w * x.powi(8))
            .sum();
        assert!((m0 - sp).abs() < 1e-13);
        assert!((m2 - sp / 2.0).abs() < 1e-13);
        assert!((m8 - 105.0 * sp / 16.0).abs() < 1e-11);
    }

    #[test]
    fn gauss_hermite_large_n_scaled_weights_finite() {
        let gh = gauss_hermite(300);
        assert!(gh.scaled_weights.iter().all(|w| w.is_finite() && *w > 0.0));
        // ∫ψ_k² = 1 for k < n
        for k in [0usize, 50, 150, 290] {
            let s: f64 = gh
                .nodes
                .iter()
                .zip(&gh.scaled_weights)
                .map(|(x, w)| w * hermite_functions(k, *x)[k].powi(2))
                .sum();
            assert!((s - 1.0).abs() < 1e-10, "k={k} s={s}");
        }
    }

    #[test]
    fn hermite_functions_orthonormal_on_grid() {
        let r = adaptive(
            |x| {
                let h = hermite_functions(7, x);
                h[7] * h[5]
            },
            -12.0,
            12.0,
            1e-14,
            0.0,
            400,
        );
        assert!(r.value.abs() < 1e-12);
    }
}
