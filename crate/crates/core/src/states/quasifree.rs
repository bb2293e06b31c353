use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{c, op_norm, CMat, HermEig};
use crate::quad;
use crate::symplin::{FloatSpace, SymplecticBasis};

/// Two-point function ⟨e_i|e_j⟩_ω on the coordinate basis.
#[derive(Debug, Clone)]
pub struct QuasifreeCovariance {
    matrix: CMat,
}

impl QuasifreeCovariance {
    /// Checks ⟨e_i|e_j⟩ − ⟨e_j|e_i⟩ = iσ(e_i,e_j) and positivity of the Hermitian part.
    pub fn new(space: &FloatSpace, matrix: CMat) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.nrows(),
            });
        }
        let form = space.form();
        for i in 0..d {
            for j in 0..d {
                let diff = matrix[(i, j)] - matrix[(j, i)] - c(0.0, form[i][j]);
                if diff.norm() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "covariance is incompatible with the form at ({i},{j}): defect {:e}",
                        diff.norm()
                    )));
                }
            }
        }
        let herm = (&matrix + matrix.adjoint()) * c(0.5, 0.0);
        let scale = op_norm(&herm).max(1.0);
        let min = HermEig::new(&herm)
            .values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "covariance is not positive (eigenvalue {min:e})"
            )));
        }
        Ok(QuasifreeCovariance { matrix })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// ⟨f|g⟩_ω for real coordinate vectors.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> Complex64 {
        let mut s = c(0.0, 0.0);
        for (i, fi) in f.iter().enumerate() {
            for (j, gj) in g.iter().enumerate() {
                s += self.matrix[(i, j)] * (fi * gj);
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.matrix)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.dim())
            .map(|i| {
                Value::Array(
                    (0..self.dim())
                        .map(|j| json!([self.matrix[(i, j)].re, self.matrix[(i, j)].im]))
                        .collect(),
                )
            })
            .collect();
        Value::Array(rows)
    }

    pub fn from_json(space: &FloatSpace, v: &Value) -> Result<Self> {
        let bad = || Error::Parse("covariance must be a square array of [re, im] pairs".into());
        let rows = v.as_array().ok_or_else(bad)?;
        let d = rows.len();
        let mut m = CMat::zeros(d, d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|r| r.len() == d).ok_or_else(bad)?;
            for (j, z) in row.iter().enumerate() {
                let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                let re = pair[0].as_f64().ok_or_else(bad)?;
                let im = pair[1].as_f64().ok_or_else(bad)?;
                m[(i, j)] = c(re, im);
            }
        }
        Self::new(space, m)
    }
}

/// Vacuum covariance of the Fock representation built on `basis`:
/// ⟨f|g⟩ = ½ Σ_l (x_l x'_l + y_l y'_l) + (i/2) σ(f,g).
pub fn fock_covariance(
    space: &FloatSpace,
    basis: &SymplecticBasis<f64>,
) -> Result<QuasifreeCovariance> {
    let d = space.dim();
    if 2 * basis.modes() != d {
        return Err(Error::InvalidArgument(
            "basis does not span the space".into(),
        ));
    }
    let coords: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            basis.coordinates(space, &e)
        })
        .collect();
    let form = space.form();
    let m = CMat::from_fn(d, d, |i, j| {
        let sym: f64 = coords[i]
            .iter()
            .zip(&coords[j])
            .map(|(a, b)| a.0 * b.0 + a.1 * b.1)
            .sum();
        c(0.5 * sym, 0.5 * form[i][j])
    });
    QuasifreeCovariance::new(space, m)
}

/// ω(δ_f) = exp(−½⟨f|f⟩_ω).
pub fn quasifree_weyl_value(cov: &QuasifreeCovariance, f: &[f64]) -> Result<Complex64> {
    if f.len() != cov.dim() {
        return Err(Error::DimensionMismatch {
            expected: cov.dim(),
            got: f.len(),
        });
    }
    Ok((cov.inner(f, f) * -0.5).exp())
}

#[derive(Debug, Clone)]
pub struct QuasifreeConfig {
    pub max_chain: usize,
    /// Absolute tolerance per integration axis.
    pub tol: f64,
    pub max_intervals: usize,
}

impl Default for QuasifreeConfig {
    fn default() -> Self {
        QuasifreeConfig {
            max_chain: 4,
            tol: 1e-8,
            max_intervals: 200,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuasifreeValue {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
}

struct Nest<'a> {
    gram: &'a CMat,
    tmax: &'a [f64],
    cfg: &'a QuasifreeConfig,
    evals: usize,
    inner_error: f64,
    failed: Option<f64>,
}

impl Nest<'_> {
    /// ∫₀^{T_k} exp(lin_k t − ½G_kk t²) · I_{k+1}(lin − tG_k·) dt.
    ///
    /// `scale` is the modulus of the outer weights multiplying this integral; the
    /// inner integral itself can be huge where they are tiny, so its tolerance
    /// and error are measured after that factor.
    fn level(&mut self, k: usize, lin: &[Complex64], scale: f64) -> Complex64 {
        let n = self.gram.nrows();
        if k == n {
            self.evals += 1;
            return c(1.0, 0.0);
        }
        let gram = self.gram;
        let gkk = gram[(k, k)];
        let (tol, maxi, tmax) = (self.cfg.tol, self.cfg.max_intervals, self.tmax[k]);
        let mut next = lin.to_vec();
        let r = quad::adaptive_vec(
            |t, out| {
                for l in k + 1..n {
                    next[l] = lin[l] - gram[(k, l)] * t;
                }
                let w = (lin[k] * t - gkk * (0.5 * t * t)).exp();
                let inner = scale * w.norm();
                out[0] = if inner < 1e-300 {
                    c(0.0, 0.0)
                } else {
                    w * self.level(k + 1, &next, inner)
                };
            },
            1,
            0.0,
            tmax,
            tol / scale,
            maxi,
        );
        let err = r.error * scale;
        if !r.converged && err > tol {
            self.failed = Some(self.failed.unwrap_or(0.0).max(err));
        }
        if k > 0 {
            self.inner_error = self.inner_error.max(err);
        }
        r.value[0]
    }
}

/// ω(∏_k R(λ_k, f_k)) for a quasifree state, by nested adaptive quadrature of
/// (−i)ⁿ ∫ exp(−Σ t_kλ_k − Σ_{k<l} t_k t_l⟨f_k|f_l⟩ − ½Σ t_l²⟨f_l|f_l⟩) dt
/// over the positive orthant, truncated at T_k = max(12 + 6‖cov‖, 24)/λ_k.
///
/// Factors with λ < 0 are first rewritten as −R(−λ, −f).
pub fn quasifree_resolvent_value(
    cov: &QuasifreeCovariance,
    chain: &[(f64, Vec<f64>)],
    cfg: &QuasifreeConfig,
) -> Result<QuasifreeValue> {
    let n = chain.len();
    if n > cfg.max_chain {
        return Err(Error::InvalidArgument(format!(
            "chain length {n} exceeds the maximum {}",
            cfg.max_chain
        )));
    }
    let mut sign = 1.0;
    let mut lams = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    for (lam, f) in chain {
        if f.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                got: f.len(),
            });
        }
        if *lam == 0.0 || !lam.is_finite() {
            return Err(Error::ImaginaryParameter);
        }
        if *lam < 0.0 {
            sign = -sign;
            lams.push(-lam);
            fs.push(f.iter().map(|x| -x).collect::<Vec<f64>>());
        } else {
            lams.push(*lam);
            fs.push(f.clone());
        }
    }
    let gram = CMat::from_fn(n, n, |k, l| cov.inner(&fs[k], &fs[l]));
    let reach = (12.0 + 6.0 * cov.norm()).max(24.0);
    let tmax: Vec<f64> = lams.iter().map(|l| reach / l).collect();
    let lin: Vec<Complex64> = lams.iter().map(|l| c(-l, 0.0)).collect();
    let mut nest = Nest {
        gram: &gram,
        tmax: &tmax,
        cfg,
        evals: 0,
        inner_error: 0.0,
        failed: None,
    };
    let raw = nest.level(0, &lin, 1.0);
    if let Some(e) = nest.failed {
        return Err(Error::Quadrature {
            estimate: e,
            target: cfg.tol,
        });
    }
    let phase = c(0.0, -1.0).powi(n as i32) * sign;
    let volume: f64 = tmax.iter().skip(1).product();
    let tail: f64 = lams.iter().map(|l| (-reach).exp() / l).sum();
    Ok(QuasifreeValue {
        value: phase * raw,
        error: cfg.tol + nest.inner_error * volume.max(1.0) + tail,
        evals: nest.evals,
    })
}
