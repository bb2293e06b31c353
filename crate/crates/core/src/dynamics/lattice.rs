//! The one-dimensional oscillator lattice
//! H_Λ = Σ_{l∈Λ} (P_l² + Q_l²) + Σ_{l,l+1∈Λ} V(Q_l − Q_{l+1})
//! with per-site cutoff N. All matrices are real: Q and P² are real in the
//! ladder basis, and V(Q_l − Q_{l+1}) is a real function of a real symmetric matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::potential::Potential;
use crate::error::{Error, Result};
use crate::fockrep::{single_field, DENSE_LIMIT};

/// Finite interval [lo, hi] of ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteInterval {
    pub lo: i64,
    pub hi: i64,
}

impl SiteInterval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!(
                "empty site interval [{lo}, {hi}]"
            )));
        }
        Ok(SiteInterval { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, other: &SiteInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// The sub-interval of length `m` placed in the middle (left-leaning).
    pub fn centered(&self, m: usize) -> Result<SiteInterval> {
        if m == 0 || m > self.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot place {m} sites inside {} sites",
                self.len()
            )));
        }
        let lo = self.lo + ((self.len() - m) / 2) as i64;
        Ok(SiteInterval {
            lo,
            hi: lo + m as i64 - 1,
        })
    }

    /// The pieces of `self` left and right of `inner` (each possibly absent).
    pub fn minus(&self, inner: &SiteInterval) -> Vec<SiteInterval> {
        let mut out = Vec::new();
        if inner.lo > self.lo {
            out.push(SiteInterval {
                lo: self.lo,
                hi: inner.lo - 1,
            });
        }
        if inner.hi < self.hi {
            out.push(SiteInterval {
                lo: inner.hi + 1,
                hi: self.hi,
            });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Dense,
    Lanczos,
}

/// Sites, cutoff and potential, with the single-site and pair matrices built once.
#[derive(Debug, Clone)]
pub struct LatticeModel {
    sites: SiteInterval,
    cutoff: usize,
    potential: Option<Potential>,
    single: DMatrix<f64>,
    pair: Option<DMatrix<f64>>,
    /// Dimensions above this use Lanczos instead of a dense eigensolve.
    pub lanczos_above: usize,
}

impl LatticeModel {
    pub fn new(sites: SiteInterval, cutoff: usize, potential: Option<Potential>) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument("cutoff must be at least 2".into()));
        }
        if let Some(p) = &potential {
            p.validate()?;
        }
        let q = single_field(cutoff, 0.0, 1.0).map(|z| z.re);
        let p = single_field(cutoff, 1.0, 0.0);
        let single = (&q * &q) + (&p * &p).map(|z| z.re);
        let pair = match &potential {
            Some(v) if v.sup_norm() > 0.0 && sites.len() > 1 => {
                let id = DMatrix::<f64>::identity(cutoff, cutoff);
                let diff = q.kronecker(&id) - id.kronecker(&q);
                let e = SymmetricEigen::new(diff);
                let mut scaled = e.eigenvectors.clone();
                for (j, &lam) in e.eigenvalues.iter().enumerate() {
                    let s = v.value(lam);
                    scaled.column_mut(j).scale_mut(s);
                }
                let m = scaled * e.eigenvectors.transpose();
                Some((&m + m.transpose()) * 0.5)
            }
            _ => None,
        };
        Ok(LatticeModel {
            sites,
            cutoff,
            potential,
            single,
            pair,
            lanczos_above: 512,
        })
    }

    pub fn sites(&self) -> SiteInterval {
        self.sites
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn potential(&self) -> Option<&Potential> {
        self.potential.as_ref()
    }

    /// ‖V‖ = sup |V|, zero without a potential.
    pub fn potential_norm(&self) -> f64 {
        self.potential.as_ref().map_or(0.0, |p| p.sup_norm())
    }

    pub fn dim(&self, lambda: &SiteInterval) -> Result<usize> {
        if !self.sites.contains(lambda) {
            return Err(Error::InvalidArgument(format!(
                "interval [{}, {}] outside the model sites [{}, {}]",
                lambda.lo, lambda.hi, self.sites.lo, self.sites.hi
            )));
        }
        (self.cutoff as u64)
            .checked_pow(lambda.len() as u32)
            .filter(|&d| d <= usize::MAX as u64 / 2)
            .map(|d| d as usize)
            .ok_or_else(|| Error::Budget("lattice dimension overflows".into()))
    }

    /// y = H_Λ x without forming the matrix.
    pub fn apply(&self, lambda: &SiteInterval, x: &[f64], y: &mut [f64]) -> Result<()> {
        let dim = self.dim(lambda)?;
        if x.len() != dim || y.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        y.iter_mut().for_each(|v| *v = 0.0);
        let len = lambda.len();
        let n = self.cutoff;
        for l in 0..len {
            apply_local(&self.single, n, n.pow((len - 1 - l) as u32), x, y);
        }
        if let Some(pair) = &self.pair {
            for l in 0..len.saturating_sub(1) {
                apply_local(pair, n * n, n.pow((len - 2 - l) as u32), x, y);
            }
        }
        Ok(())
    }

    /// Dense H_Λ; fails beyond the dense budget.
    pub fn hamiltonian(&self, lambda: &SiteInterval) -> Result<DMatrix<f64>> {
        let dim = self.dim(lambda)?;
        if dim > DENSE_LIMIT {
            return Err(Error::Budget(format!(
                "dimension {dim} exceeds the dense limit {DENSE_LIMIT}; use apply with ground_state's Lanczos path"
            )));
        }
        let mut h = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        let mut col = vec![0.0; dim];
        for j in 0..dim {
            e[j] = 1.0;
            self.apply(lambda, &e, &mut col)?;
            h.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        Ok(h)
    }

    pub fn ground_state(&self, lambda: &SiteInterval) -> Result<GroundStateResult> {
        let dim = self.dim(lambda)?;
        if dim <= self.lanczos_above.min(DENSE_LIMIT) {
            let h = self.hamiltonian(lambda)?;
            let e = SymmetricEigen::new(h.clone());
            let mut idx: Vec<usize> = (0..dim).collect();
            idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
            let energy = e.eigenvalues[idx[0]];
            let gap = if dim > 1 {
                e.eigenvalues[idx[1]] - energy
            } else {
                f64::INFINITY
            };
            let vector = normalize_sign(e.eigenvectors.column(idx[0]).into_owned());
            let h_norm = e.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let residual = (&h * &vector - &vector * energy).norm();
            return Ok(GroundStateResult {
                energy,
                vector,
                gap,
                residual,
                h_norm,
                solver: Solver::Dense,
                dim,
            });
        }
        self.lanczos(lambda, dim)
    }

    fn lanczos(&self, lambda: &SiteInterval, dim: usize) -> Result<GroundStateResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut start = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let krylov = dim.min(240);
        let mut tmp = vec![0.0; dim];
        let mut best = None;
        for _restart in 0..30 {
            start /= start.norm();
            let mut basis: Vec<DVector<f64>> = vec![start.clone()];
            let (mut alpha, mut beta) = (Vec::new(), Vec::new());
            let mut ritz = None;
            for j in 0..krylov {
                self.apply(lambda, basis[j].as_slice(), &mut tmp)?;
                let mut w = DVector::from_column_slice(&tmp);
                let a = basis[j].dot(&w);
                alpha.push(a);
                for _ in 0..2 {
                    for v in &basis {
                        let s = v.dot(&w);
                        w.axpy(-s, v, 1.0);
                    }
                }
                let b = w.norm();
                let done = j + 1 == krylov || b < 1e-12 * a.abs().max(1.0);
                if done || (j + 1) % 10 == 0 {
                    let t = tridiagonal(&alpha, &beta);
                    let e = SymmetricEigen::new(t);
                    let mut idx: Vec<usize> = (0..alpha.len()).collect();
                    idx.sort_by(|&x, &y| e.eigenvalues[x].total_cmp(&e.eigenvalues[y]));
                    let theta = e.eigenvalues[idx[0]];
                    let tnorm = e.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
                    let est = b * e.eigenvectors[(alpha.len() - 1, idx[0])].abs();
                    if done || est <= 1e-11 * tnorm {
                        let mut x = DVector::zeros(dim);
                        for (k, v) in basis.iter().enumerate() {
                            x.axpy(e.eigenvectors[(k, idx[0])], v, 1.0);
                        }
                        let second = idx.get(1).map(|&i| e.eigenvalues[i]);
                        ritz = Some((theta, second, x, tnorm));
                        break;
                    }
                }
                beta.push(b);
                basis.push(w / b);
            }
            let (theta, second, x, tnorm) = ritz.expect("Lanczos loop always yields a Ritz pair");
            let x = normalize_sign(&x / x.norm());
            self.apply(lambda, x.as_slice(), &mut tmp)?;
            let hx = DVector::from_column_slice(&tmp);
            let energy = x.dot(&hx);
            let residual = (&hx - &x * energy).norm();
            let gap = second.map_or(f64::INFINITY, |s| s - theta);
            let result = GroundStateResult {
                energy,
                vector: x.clone(),
                gap,
                residual,
                h_norm: tnorm,
                solver: Solver::Lanczos,
                dim,
            };
            if residual <= 1e-9 * tnorm {
                return Ok(result);
            }
            start = x;
            best = Some(result);
        }
        let r = best.expect("at least one restart ran");
        Err(Error::Solver(format!(
            "Lanczos did not converge: residual {:.3e}",
            r.residual
        )))
    }

    /// ω_n((μ + H̃_m)⁻¹) for the inner interval, against the paper's bounds.
    pub fn sandwich(
        &self,
        outer: &SiteInterval,
        inner: &SiteInterval,
        mus: &[f64],
    ) -> Result<Vec<SandwichResult>> {
        if !outer.contains(inner) {
            return Err(Error::InvalidArgument(
                "inner interval must lie inside the outer one".into(),
            ));
        }
        if mus.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument("μ must be positive".into()));
        }
        let gs = self.ground_state(outer)?;
        let rho = reduced_density(&gs.vector, self.cutoff, outer, inner);
        let h_m = self.hamiltonian(inner)?;
        let e = SymmetricEigen::new(h_m);
        let e_m = e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        // populations of the H_m eigenvectors in ρ_m
        let weights: Vec<f64> = (0..e.eigenvalues.len())
            .map(|k| {
                let u = e.eigenvectors.column(k);
                u.dot(&(&rho * u))
            })
            .collect();
        let vnorm = self.potential_norm();
        Ok(mus
            .iter()
            .map(|&mu| {
                let value = weights
                    .iter()
                    .zip(e.eigenvalues.iter())
                    .map(|(w, &l)| w / (mu + l - e_m))
                    .sum::<f64>();
                SandwichResult {
                    mu,
                    lower: 1.0 / (mu + 4.0 * vnorm),
                    value,
                    upper: 1.0 / mu,
                    residual: gs.residual,
                }
            })
            .collect())
    }

    /// E_m + E_{n∖m} − E_n for nested intervals.
    pub fn superadditivity(
        &self,
        outer: &SiteInterval,
        inner: &SiteInterval,
    ) -> Result<SuperadditivityResult> {
        if !outer.contains(inner) {
            return Err(Error::InvalidArgument(
                "inner interval must lie inside the outer one".into(),
            ));
        }
        let n = self.ground_state(outer)?;
        let m = self.ground_state(inner)?;
        let mut e_rest = 0.0;
        let mut residual = n.residual + m.residual;
        for piece in outer.minus(inner) {
            let g = self.ground_state(&piece)?;
            e_rest += g.energy;
            residual += g.residual;
        }
        let value = m.energy + e_rest - n.energy;
        let bound = -2.0 * self.potential_norm();
        Ok(SuperadditivityResult {
            e_m: m.energy,
            e_rest,
            e_n: n.energy,
            value,
            bound,
            residual,
            holds: value >= bound - residual,
        })
    }
}

/// y += (𝟙_left ⊗ M ⊗ 𝟙_right) x with local dimension `local` and right block `right`.
fn apply_local(m: &DMatrix<f64>, local: usize, right: usize, x: &[f64], y: &mut [f64]) {
    let block = local * right;
    for (xb, yb) in x.chunks(block).zip(y.chunks_mut(block)) {
        for i in 0..local {
            for j in 0..local {
                let a = m[(i, j)];
                if a == 0.0 {
                    continue;
                }
                let (yr, xr) = (
                    &mut yb[i * right..(i + 1) * right],
                    &xb[j * right..(j + 1) * right],
                );
                for (yv, xv) in yr.iter_mut().zip(xr) {
                    *yv += a * xv;
                }
            }
        }
    }
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let k = alpha.len();
    DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    })
}

/// Fix the sign so the largest-magnitude entry is positive.
fn normalize_sign(v: DVector<f64>) -> DVector<f64> {
    let k = v.iamax();
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}

/// ρ_m = Tr_{outer∖inner} |Ω⟩⟨Ω|.
fn reduced_density(
    omega: &DVector<f64>,
    n: usize,
    outer: &SiteInterval,
    inner: &SiteInterval,
) -> DMatrix<f64> {
    let left = n.pow((inner.lo - outer.lo) as u32);
    let mid = n.pow(inner.len() as u32);
    let right = n.pow((outer.hi - inner.hi) as u32);
    let mut rho = DMatrix::zeros(mid, mid);
    for a in 0..left {
        let slice = &omega.as_slice()[a * mid * right..(a + 1) * mid * right];
        let x = DMatrix::from_row_slice(mid, right, slice);
        rho += &x * x.transpose();
    }
    rho
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    pub vector: DVector<f64>,
    /// Second-lowest minus lowest eigenvalue; from Lanczos this is the next
    /// distinct Ritz value.
    pub gap: f64,
    pub residual: f64,
    /// max |eigenvalue| (dense) or max |Ritz value| (Lanczos).
    pub h_norm: f64,
    pub solver: Solver,
    pub dim: usize,
}

impl GroundStateResult {
    /// |⟨Ω₀ ⊗ ⋯ ⊗ Ω₀, Ω⟩|: the product vacuum is the first basis vector.
    pub fn vacuum_overlap(&self) -> f64 {
        self.vector[0].abs()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SandwichResult {
    pub mu: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub residual: f64,
}

impl SandwichResult {
    pub fn holds(&self, slack: f64) -> bool {
        self.lower - slack <= self.value && self.value <= self.upper + slack
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuperadditivityResult {
    pub e_m: f64,
    pub e_rest: f64,
    pub e_n: f64,
    pub value: f64,
    pub bound: f64,
    pub residual: f64,
    pub holds: bool,
}
