//! Truncated Fock representations.
//!
//! Each mode is an oscillator truncated to `cutoff` levels; the basis index is
//! row-major over modes with mode 0 most significant. With Q = (a + a†)/√2 and
//! P = (a − a†)/(i√2) the field of f = Σ x_l q_l + y_l p_l is Σ x_l P_l + y_l Q_l.
//!
//! Every single-mode field x P + y Q is unitarily |y − ix|·Q, so one real
//! eigendecomposition of the truncated Q (cached at construction) diagonalizes
//! all fields, resolvents and Weyl operators mode by mode.

mod dump;

pub use dump::{read_dump, write_dump};

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, kron, CMat, CVec, RealEig};
use crate::quad;
use crate::resolvsym::Poly;
use crate::symplin::{symplectic_basis, ExactSpace, FloatSpace, SymplecticBasis};

pub type OperatorMatrix = CMat;

/// Largest total dimension for dense factorizations.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
pub struct TruncatedRep {
    space: FloatSpace,
    basis: SymplecticBasis<f64>,
    cutoff: usize,
    modes: usize,
    dim: usize,
    q_eig: Arc<RealEig>,
}

/// Spectral data of φ(f): per-mode unitaries (None for modes where f has no
/// component) and per-mode scaled eigenvalues.
struct FieldSpectrum {
    units: Vec<Option<CMat>>,
    scales: Vec<f64>,
}

impl TruncatedRep {
    pub fn new(space: &FloatSpace, basis: &SymplecticBasis<f64>, cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument("cutoff must be at least 2".into()));
        }
        let modes = basis.modes();
        if 2 * modes != space.dim() {
            return Err(Error::InvalidArgument(
                "basis does not span the space".into(),
            ));
        }
        for v in basis.q.iter().chain(&basis.p) {
            space.check(v)?;
        }
        let defect = crate::symplin::canonical_gram_defect(space, basis);
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "basis is not symplectic (defect {defect:e})"
            )));
        }
        let dim = cutoff
            .checked_pow(modes as u32)
            .ok_or_else(|| Error::Budget("representation dimension overflows".into()))?;
        let q = single_q(cutoff);
        Ok(TruncatedRep {
            space: space.clone(),
            basis: basis.clone(),
            cutoff,
            modes,
            dim,
            q_eig: Arc::new(RealEig::new(&q)),
        })
    }

    /// Standard 2n-dimensional space with the minimal-index symplectic basis.
    pub fn standard(modes: usize, cutoff: usize) -> Self {
        let space = ExactSpace::standard(modes);
        Self::from_exact(&space, cutoff).expect("standard space is valid")
    }

    pub fn from_exact(space: &ExactSpace, cutoff: usize) -> Result<Self> {
        let basis = symplectic_basis(space)?;
        Self::new(&FloatSpace::from_exact(space), &basis.to_f64(), cutoff)
    }

    pub fn space(&self) -> &FloatSpace {
        &self.space
    }

    pub fn basis(&self) -> &SymplecticBasis<f64> {
        &self.basis
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues of the single-mode truncated Q.
    pub fn q_spectrum(&self) -> &[f64] {
        &self.q_eig.values
    }

    /// (x_l, y_l) of f, so that φ(f) = Σ x_l P_l + y_l Q_l.
    pub fn mode_coords(&self, f: &[f64]) -> Result<Vec<(f64, f64)>> {
        self.space.check(f)?;
        Ok(self.basis.coordinates(&self.space, f))
    }

    fn stride(&self, l: usize) -> usize {
        self.cutoff.pow((self.modes - 1 - l) as u32)
    }

    pub fn level(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.cutoff
    }

    /// Basis indices whose levels are all below `limit` in every mode.
    pub fn low_levels(&self, limit: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| (0..self.modes).all(|l| self.level(i, l) < limit))
            .collect()
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim);
        v[0] = c(1.0, 0.0);
        v
    }

    fn embed(&self, single: &CMat, mode: usize) -> CMat {
        let left = self.cutoff.pow(mode as u32);
        let right = self.stride(mode);
        let mut out = CMat::zeros(self.dim, self.dim);
        let n = self.cutoff;
        for a in 0..left {
            for i in 0..n {
                for j in 0..n {
                    let s = single[(i, j)];
                    if s == c(0.0, 0.0) {
                        continue;
                    }
                    for b in 0..right {
                        out[((a * n + i) * right + b, (a * n + j) * right + b)] = s;
                    }
                }
            }
        }
        out
    }

    pub fn q_matrix(&self, mode: usize) -> CMat {
        self.embed(&single_field(self.cutoff, 0.0, 1.0), mode)
    }

    pub fn p_matrix(&self, mode: usize) -> CMat {
        self.embed(&single_field(self.cutoff, 1.0, 0.0), mode)
    }

    fn check_dense(&self) -> Result<()> {
        if self.dim > DENSE_LIMIT {
            return Err(Error::Budget(format!(
                "dimension {} exceeds the dense limit {}; use the vector methods",
                self.dim, DENSE_LIMIT
            )));
        }
        Ok(())
    }

    pub fn field_matrix(&self, f: &[f64]) -> Result<OperatorMatrix> {
        self.check_dense()?;
        let coords = self.mode_coords(f)?;
        let mut out = CMat::zeros(self.dim, self.dim);
        for (l, &(x, y)) in coords.iter().enumerate() {
            if x != 0.0 || y != 0.0 {
                out += self.embed(&single_field(self.cutoff, x, y), l);
            }
        }
        Ok(out)
    }

    /// (iz − φ(f))⁻¹ by LU factorization.
    pub fn resolvent_matrix(&self, z: Complex64, f: &[f64]) -> Result<OperatorMatrix> {
        if z.re == 0.0 {
            return Err(Error::ImaginaryParameter);
        }
        let phi = self.field_matrix(f)?;
        let a = CMat::identity(self.dim, self.dim) * (c(0.0, 1.0) * z) - phi;
        a.lu()
            .try_inverse()
            .ok_or_else(|| Error::Solver("singular resolvent system".into()))
    }

    fn spectrum(&self, f: &[f64]) -> Result<FieldSpectrum> {
        let coords = self.mode_coords(f)?;
        let n = self.cutoff;
        let mut units = Vec::with_capacity(self.modes);
        let mut scales = Vec::with_capacity(self.modes);
        for &(x, y) in &coords {
            let cc = c(y, -x);
            let r = cc.norm();
            if r == 0.0 {
                units.push(None);
                scales.push(0.0);
                continue;
            }
            let theta = cc.arg();
            let u = CMat::from_fn(n, n, |i, j| {
                Complex64::from_polar(1.0, -(i as f64) * theta) * self.q_eig.vectors[(i, j)]
            });
            units.push(Some(u));
            scales.push(r);
        }
        Ok(FieldSpectrum { units, scales })
    }

    /// Eigenvalue of φ(f) at a spectral multi-index encoded like a basis index.
    fn eigenvalue(&self, spec: &FieldSpectrum, index: usize) -> f64 {
        (0..self.modes)
            .map(|l| {
                if spec.units[l].is_some() {
                    spec.scales[l] * self.q_eig.values[self.level(index, l)]
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Applies ⊗U_l (or its adjoint) to every column of `block`.
    fn transform(&self, spec: &FieldSpectrum, block: &mut CMat, adjoint: bool) {
        let n = self.cutoff;
        let mut tmp = vec![c(0.0, 0.0); n];
        for (l, u) in spec.units.iter().enumerate() {
            let Some(u) = u else { continue };
            let u = if adjoint { u.adjoint() } else { u.clone() };
            let inner = self.stride(l);
            let outer = self.dim / (inner * n);
            for col in 0..block.ncols() {
                let mut column = block.column_mut(col);
                for o in 0..outer {
                    for s in 0..inner {
                        let base = o * n * inner + s;
                        for (i, t) in tmp.iter_mut().enumerate() {
                            let mut acc = c(0.0, 0.0);
                            for j in 0..n {
                                acc += u[(i, j)] * column[base + j * inner];
                            }
                            *t = acc;
                        }
                        for (i, t) in tmp.iter().enumerate() {
                            column[base + i * inner] = *t;
                        }
                    }
                }
            }
        }
    }

    /// block ← g(φ(f)) · block for a scalar function g.
    pub fn apply_function<G: Fn(f64) -> Complex64>(
        &self,
        f: &[f64],
        g: G,
        block: &mut CMat,
    ) -> Result<()> {
        if block.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: block.nrows(),
            });
        }
        let spec = self.spectrum(f)?;
        self.transform(&spec, block, true);
        for i in 0..self.dim {
            let s = g(self.eigenvalue(&spec, i));
            for j in 0..block.ncols() {
                block[(i, j)] *= s;
            }
        }
        self.transform(&spec, block, false);
        Ok(())
    }

    pub fn apply_resolvent(&self, z: Complex64, f: &[f64], block: &mut CMat) -> Result<()> {
        if z.re == 0.0 {
            return Err(Error::ImaginaryParameter);
        }
        let iz = c(0.0, 1.0) * z;
        self.apply_function(f, |v| (iz - v).inv(), block)
    }

    /// exp(iφ(f)) via per-mode Hermitian eigendecompositions.
    pub fn weyl_matrix(&self, f: &[f64]) -> Result<OperatorMatrix> {
        self.check_dense()?;
        let spec = self.spectrum(f)?;
        let n = self.cutoff;
        let mut out = CMat::identity(1, 1);
        for l in 0..self.modes {
            let w = match &spec.units[l] {
                None => CMat::identity(n, n),
                Some(u) => {
                    let s = spec.scales[l];
                    let mut scaled = u.clone();
                    for j in 0..n {
                        let ph = Complex64::from_polar(1.0, s * self.q_eig.values[j]);
                        for i in 0..n {
                            scaled[(i, j)] *= ph;
                        }
                    }
                    scaled * u.adjoint()
                }
            };
            out = kron(&out, &w);
        }
        Ok(out)
    }

    /// Eigenvectors (as a dense unitary) and eigenvalues of φ(f).
    fn dense_spectrum(&self, f: &[f64]) -> Result<(CMat, Vec<f64>)> {
        self.check_dense()?;
        let spec = self.spectrum(f)?;
        let n = self.cutoff;
        let mut u = CMat::identity(1, 1);
        for l in 0..self.modes {
            let ul = spec.units[l]
                .clone()
                .unwrap_or_else(|| CMat::identity(n, n));
            u = kron(&u, &ul);
        }
        let vals = (0..self.dim).map(|i| self.eigenvalue(&spec, i)).collect();
        Ok((u, vals))
    }

    /// −i ∫₀^{sign(λ)∞} e^{−λt} W(−tf) dt by adaptive Gauss–Kronrod.
    ///
    /// All W(−tf) are diagonal in the eigenbasis of φ(f), so the integrand is
    /// evaluated there and the basis change is applied once to the result.
    /// The Frobenius error estimate is basis independent.
    pub fn laplace_resolvent(
        &self,
        lambda: f64,
        f: &[f64],
        cfg: &LaplaceConfig,
    ) -> Result<LaplaceResult> {
        if lambda == 0.0 {
            return Err(Error::InvalidArgument("lambda must be nonzero".into()));
        }
        let (u, vals) = self.dense_spectrum(f)?;
        let s = lambda.signum();
        let a = lambda.abs();
        let t_max = cfg.tail.ln().abs() / a;
        let r = quad::adaptive_vec(
            |t, out| {
                let damp = (-a * t).exp();
                for (o, v) in out.iter_mut().zip(&vals) {
                    *o = Complex64::from_polar(damp, -s * t * v);
                }
            },
            vals.len(),
            0.0,
            t_max,
            cfg.abs_tol,
            cfg.max_intervals,
        );
        if !r.converged {
            return Err(Error::Quadrature {
                estimate: r.error,
                target: cfg.abs_tol,
            });
        }
        let pref = c(0.0, -s);
        let cols: Vec<usize> = cfg
            .columns
            .clone()
            .unwrap_or_else(|| (0..self.dim).collect());
        let mut scaled = CMat::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let d = r.value[j] * pref;
            for i in 0..self.dim {
                scaled[(i, j)] = u[(i, j)] * d;
            }
        }
        let ucols = CMat::from_fn(self.dim, cols.len(), |i, k| u[(cols[k], i)].conj());
        let matrix = scaled * ucols;
        Ok(LaplaceResult {
            matrix,
            columns: cols,
            error: r.error + cfg.tail,
            evals: r.evals,
        })
    }

    /// ‖iλR(λ,f)Ψ − Ψ‖.
    pub fn regular_limit_defect(&self, lambda: f64, f: &[f64], psi: &CVec) -> Result<f64> {
        let mut block = CMat::from_column_slice(self.dim, 1, psi.as_slice());
        self.apply_resolvent(c(lambda, 0.0), f, &mut block)?;
        let il = c(0.0, lambda);
        Ok((0..self.dim)
            .map(|i| (il * block[(i, 0)] - psi[i]).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Frobenius norm of the ordered product ∏ R(λ_k, f_k).
    ///
    /// Factors supported on single modes are grouped per mode (tensor factors
    /// commute) and the norm factorizes; otherwise the product is formed densely.
    pub fn compact_product_hs(&self, factors: &[(f64, Vec<f64>)]) -> Result<f64> {
        let n = self.cutoff;
        let mut per_mode: Vec<CMat> = vec![CMat::identity(n, n); self.modes];
        let mut single = true;
        for (lam, f) in factors {
            if *lam == 0.0 {
                return Err(Error::ImaginaryParameter);
            }
            let coords = self.mode_coords(f)?;
            let active: Vec<usize> = (0..self.modes)
                .filter(|&l| coords[l] != (0.0, 0.0))
                .collect();
            match active.as_slice() {
                [] => {
                    for m in per_mode.iter_mut().take(1) {
                        *m *= c(0.0, -1.0 / lam);
                    }
                }
                [l] => {
                    let (x, y) = coords[*l];
                    let a = CMat::identity(n, n) * c(0.0, *lam) - single_field(n, x, y);
                    let r = a
                        .lu()
                        .try_inverse()
                        .ok_or_else(|| Error::Solver("singular".into()))?;
                    per_mode[*l] = &per_mode[*l] * r;
                }
                _ => {
                    single = false;
                    break;
                }
            }
        }
        if single {
            return Ok(per_mode.iter().map(frobenius).product());
        }
        let mut prod = CMat::identity(self.dim, self.dim);
        for (lam, f) in factors {
            prod *= self.resolvent_matrix(c(*lam, 0.0), f)?;
        }
        Ok(frobenius(&prod))
    }

    /// block ← π(p) · block.
    pub fn apply_poly(&self, p: &Poly, block: &CMat) -> Result<CMat> {
        let mut out = CMat::zeros(block.nrows(), block.ncols());
        for m in p.monomials() {
            let mut cur = block.clone();
            for g in m.factors.iter().rev() {
                self.apply_resolvent(g.z_f64(), &g.f_f64(), &mut cur)?;
            }
            out += cur * m.coeff_f64();
        }
        Ok(out)
    }

    /// ⟨Ψ, π(p)Ψ⟩.
    pub fn evaluate_state(&self, psi: &CVec, p: &Poly) -> Result<Complex64> {
        p.check_dim(self.space.dim())?;
        let block = CMat::from_column_slice(self.dim, 1, psi.as_slice());
        let out = self.apply_poly(p, &block)?;
        Ok((0..self.dim).map(|i| psi[i].conj() * out[(i, 0)]).sum())
    }

    /// Dense π(p), for small representations.
    pub fn poly_matrix(&self, p: &Poly) -> Result<OperatorMatrix> {
        self.check_dense()?;
        p.check_dim(self.space.dim())?;
        self.apply_poly(p, &CMat::identity(self.dim, self.dim))
    }

    /// Operator norm of π(p) compressed to levels below `limit` in every mode.
    pub fn compressed_poly_norm(&self, p: &Poly, limit: usize) -> Result<f64> {
        p.check_dim(self.space.dim())?;
        let idx = self.low_levels(limit);
        let mut block = CMat::zeros(self.dim, idx.len());
        for (k, &i) in idx.iter().enumerate() {
            block[(i, k)] = c(1.0, 0.0);
        }
        let out = self.apply_poly(p, &block)?;
        let small = CMat::from_fn(idx.len(), idx.len(), |i, j| out[(idx[i], j)]);
        Ok(crate::linalg::op_norm(&small))
    }

    /// ‖(φ(p_l) + iφ(q_l))Ω₀‖ summed over modes; zero for the Fock vacuum.
    pub fn vacuum_annihilation_defect(&self) -> Result<f64> {
        let omega = self.vacuum();
        let mut total = 0.0;
        for l in 0..self.modes {
            let a = self.field_matrix(&self.basis.p[l])?
                + self.field_matrix(&self.basis.q[l])? * c(0.0, 1.0);
            total += (a * &omega).norm();
        }
        Ok(total)
    }
}

#[derive(Debug, Clone)]
pub struct LaplaceConfig {
    pub abs_tol: f64,
    /// Truncation of the half line at e^{−|λ|T} = tail.
    pub tail: f64,
    pub max_intervals: usize,
    pub columns: Option<Vec<usize>>,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        LaplaceConfig {
            abs_tol: 1e-11,
            tail: 1e-12,
            max_intervals: 4000,
            columns: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LaplaceResult {
    /// Columns of the resolvent listed in `columns`.
    pub matrix: CMat,
    pub columns: Vec<usize>,
    pub error: f64,
    pub evals: usize,
}

/// Truncated single-mode x·P + y·Q.
pub fn single_field(n: usize, x: f64, y: f64) -> CMat {
    let mut m = CMat::zeros(n, n);
    for k in 0..n - 1 {
        let s = ((k + 1) as f64 / 2.0).sqrt();
        m[(k, k + 1)] = c(y, -x) * s;
        m[(k + 1, k)] = c(y, x) * s;
    }
    m
}

fn single_q(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        let s = ((k + 1) as f64 / 2.0).sqrt();
        m[(k, k + 1)] = s;
        m[(k + 1, k)] = s;
    }
    m
}

#[cfg(test)]
mod tests;
