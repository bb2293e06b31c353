//! Finite-dimensional symplectic linear algebra.
//!
//! Coordinates are generic over [`Scalar`]: `BigRational` for exact work and
//! `f64` with a relative rank tolerance. The basis convention is
//! σ(p_i, q_j) = δ_ij.

mod scalar;

pub use scalar::{rat, Scalar};

use num_rational::BigRational;

use crate::error::{Error, Result};

pub type FieldVector<S> = Vec<S>;

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace<S: Scalar> {
    dim: usize,
    form: Vec<Vec<S>>,
    tol: f64,
}

pub type ExactSpace = SymplecticSpace<BigRational>;
pub type FloatSpace = SymplecticSpace<f64>;

impl<S: Scalar> SymplecticSpace<S> {
    /// Builds a space from the matrix of σ on the coordinate basis.
    pub fn new(form: Vec<Vec<S>>) -> Result<Self> {
        Self::with_tolerance(form, DEFAULT_RANK_TOL)
    }

    pub fn with_tolerance(form: Vec<Vec<S>>, tol: f64) -> Result<Self> {
        let dim = form.len();
        for row in &form {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        let scale = max_abs(&form);
        for i in 0..dim {
            for j in 0..dim {
                let s = form[i][j].clone() + form[j][i].clone();
                if !s.negligible(scale, 1e-12) {
                    return Err(Error::NotAntisymmetric);
                }
            }
        }
        if dim == 0 || S::rank(&form, dim, tol) < dim {
            return Err(Error::Degenerate);
        }
        Ok(SymplecticSpace { dim, form, tol })
    }

    /// ℝ^{2n} with σ(e_{2k}, e_{2k+1}) = 1 on each coordinate pair.
    pub fn standard(modes: usize) -> Self {
        let dim = 2 * modes;
        let mut form = vec![vec![S::zero(); dim]; dim];
        for k in 0..modes {
            form[2 * k][2 * k + 1] = S::one();
            form[2 * k + 1][2 * k] = -S::one();
        }
        SymplecticSpace {
            dim,
            form,
            tol: DEFAULT_RANK_TOL,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &[Vec<S>] {
        &self.form
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn check(&self, f: &[S]) -> Result<()> {
        if f.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: f.len(),
            });
        }
        Ok(())
    }

    /// σ(f, g) = fᵀ · form · g.
    pub fn sigma(&self, f: &[S], g: &[S]) -> Result<S> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.sigma_unchecked(f, g))
    }

    pub(crate) fn sigma_unchecked(&self, f: &[S], g: &[S]) -> S {
        let mut acc = S::zero();
        for i in 0..self.dim {
            if f[i].is_zero() {
                continue;
            }
            let mut row = S::zero();
            for j in 0..self.dim {
                if !g[j].is_zero() && !self.form[i][j].is_zero() {
                    row = row + self.form[i][j].clone() * g[j].clone();
                }
            }
            acc = acc + f[i].clone() * row;
        }
        acc
    }

    /// Whether σ(f,g) is zero at the scale of the inputs.
    pub fn sigma_vanishes(&self, f: &[S], g: &[S]) -> bool {
        let s = self.sigma_unchecked(f, g);
        s.negligible(norm(f) * norm(g) * max_abs(&self.form), self.tol)
    }

    /// The covector σ(f, ·) as a row.
    fn sigma_row(&self, f: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|j| {
                let mut acc = S::zero();
                for i in 0..self.dim {
                    if !f[i].is_zero() {
                        acc = acc + f[i].clone() * self.form[i][j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn gram(&self, vs: &[Vec<S>]) -> Vec<Vec<S>> {
        vs.iter()
            .map(|a| vs.iter().map(|b| self.sigma_unchecked(a, b)).collect())
            .collect()
    }

    pub fn rank_of(&self, vs: &[Vec<S>]) -> usize {
        S::rank(vs, self.dim, self.tol)
    }

    fn in_span(&self, span: &[Vec<S>], v: &[S]) -> bool {
        let mut all = span.to_vec();
        all.push(v.to_vec());
        self.rank_of(&all) == self.rank_of(span)
    }

    /// Change of coordinates by an invertible matrix T (columns are the new basis):
    /// the form Tᵀ·form·T.
    pub fn pullback(&self, t: &[Vec<S>]) -> Result<Self> {
        let cols: Vec<Vec<S>> = (0..self.dim)
            .map(|j| t.iter().map(|r| r[j].clone()).collect())
            .collect();
        Self::with_tolerance(self.gram(&cols), self.tol)
    }
}

impl FloatSpace {
    pub fn from_exact(space: &ExactSpace) -> Self {
        SymplecticSpace {
            dim: space.dim,
            form: space
                .form
                .iter()
                .map(|r| r.iter().map(Scalar::to_f64).collect())
                .collect(),
            tol: space.tol,
        }
    }
}

impl ExactSpace {
    /// Exact rational copy of a float form (binary floats are exact rationals).
    pub fn from_float_form(form: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            form.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_f64(x)).collect())
                .collect(),
        )
    }
}

fn norm<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

fn max_abs<S: Scalar>(m: &[Vec<S>]) -> f64 {
    m.iter()
        .flatten()
        .fold(0.0f64, |a, x| a.max(x.to_f64().abs()))
}

fn axpy<S: Scalar>(acc: &mut [S], a: &S, x: &[S]) {
    if a.is_zero() {
        return;
    }
    for (y, xi) in acc.iter_mut().zip(x) {
        *y = y.clone() + a.clone() * xi.clone();
    }
}

fn scale<S: Scalar>(v: &[S], a: &S) -> Vec<S> {
    v.iter().map(|x| x.clone() * a.clone()).collect()
}

/// Linearly independent vectors spanning a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<S: Scalar> {
    basis: Vec<Vec<S>>,
}

impl<S: Scalar> Subspace<S> {
    pub fn new(space: &SymplecticSpace<S>, basis: Vec<Vec<S>>) -> Result<Self> {
        for b in &basis {
            space.check(b)?;
        }
        if space.rank_of(&basis) != basis.len() {
            return Err(Error::Dependent);
        }
        Ok(Subspace { basis })
    }

    /// Extracts an independent spanning set from arbitrary generators.
    pub fn spanned_by(space: &SymplecticSpace<S>, gens: &[Vec<S>]) -> Result<Self> {
        let mut basis: Vec<Vec<S>> = Vec::new();
        for g in gens {
            space.check(g)?;
            if !space.in_span(&basis, g) {
                basis.push(g.clone());
            }
        }
        Ok(Subspace { basis })
    }

    pub fn zero() -> Self {
        Subspace { basis: Vec::new() }
    }

    pub fn whole(space: &SymplecticSpace<S>) -> Self {
        let d = space.dim();
        Subspace {
            basis: (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| if i == j { S::one() } else { S::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, space: &SymplecticSpace<S>, v: &[S]) -> bool {
        space.in_span(&self.basis, v)
    }

    pub fn is_nondegenerate(&self, space: &SymplecticSpace<S>) -> bool {
        let g = space.gram(&self.basis);
        S::rank(&g, self.basis.len(), space.tol) == self.basis.len()
    }
}

/// Ordered symplectic basis {q_1, p_1; …; q_n, p_n} with σ(p_i, q_j) = δ_ij.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticBasis<S: Scalar> {
    pub q: Vec<Vec<S>>,
    pub p: Vec<Vec<S>>,
}

impl<S: Scalar> SymplecticBasis<S> {
    pub fn modes(&self) -> usize {
        self.q.len()
    }

    pub fn ordered(&self) -> Vec<Vec<S>> {
        self.q
            .iter()
            .zip(&self.p)
            .flat_map(|(q, p)| [q.clone(), p.clone()])
            .collect()
    }

    /// Coordinates (x_l, y_l) with f = Σ x_l q_l + y_l p_l, read off as
    /// x_l = σ(p_l, f) and y_l = σ(f, q_l).
    pub fn coordinates(&self, space: &SymplecticSpace<S>, f: &[S]) -> Vec<(S, S)> {
        self.q
            .iter()
            .zip(&self.p)
            .map(|(q, p)| (space.sigma_unchecked(p, f), space.sigma_unchecked(f, q)))
            .collect()
    }

    pub fn to_f64(&self) -> SymplecticBasis<f64> {
        let conv = |v: &Vec<Vec<S>>| {
            v.iter()
                .map(|x| x.iter().map(Scalar::to_f64).collect())
                .collect()
        };
        SymplecticBasis {
            q: conv(&self.q),
            p: conv(&self.p),
        }
    }
}

/// Projection of v onto the span of a symplectic system, Σ σ(v,q_i)p_i + σ(p_i,v)q_i.
fn project<S: Scalar>(space: &SymplecticSpace<S>, q: &[Vec<S>], p: &[Vec<S>], v: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); space.dim];
    for (qi, pi) in q.iter().zip(p) {
        axpy(&mut out, &space.sigma_unchecked(v, qi), pi);
        axpy(&mut out, &space.sigma_unchecked(pi, v), qi);
    }
    out
}

fn minus<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect()
}

/// Minimal-index construction of a symplectic basis for the span of `gens`.
pub fn symplectic_basis_of<S: Scalar>(
    space: &SymplecticSpace<S>,
    gens: &[Vec<S>],
) -> Result<SymplecticBasis<S>> {
    for g in gens {
        space.check(g)?;
    }
    let target = space.rank_of(gens);
    if target % 2 == 1 {
        return Err(Error::OddDimension(target));
    }
    let mut q: Vec<Vec<S>> = Vec::new();
    let mut p: Vec<Vec<S>> = Vec::new();
    while 2 * q.len() < target {
        let span: Vec<Vec<S>> = q.iter().chain(p.iter()).cloned().collect();
        let m = gens
            .iter()
            .position(|e| !space.in_span(&span, e))
            .ok_or(Error::Degenerate)?;
        let pk = minus(&gens[m], &project(space, &q, &p, &gens[m]));
        let l = gens
            .iter()
            .position(|e| !space.sigma_vanishes(&pk, e))
            .ok_or(Error::Degenerate)?;
        let qt = minus(&gens[l], &project(space, &q, &p, &gens[l]));
        let s = space.sigma_unchecked(&pk, &qt);
        if s.negligible(norm(&pk) * norm(&qt) * max_abs(&space.form), space.tol) {
            return Err(Error::Degenerate);
        }
        let qk = scale(&qt, &(S::one() / s));
        p.push(pk);
        q.push(qk);
    }
    Ok(SymplecticBasis { q, p })
}

/// Symplectic basis of the whole space built from the coordinate basis.
pub fn symplectic_basis<S: Scalar>(space: &SymplecticSpace<S>) -> Result<SymplecticBasis<S>> {
    if space.dim % 2 == 1 {
        return Err(Error::OddDimension(space.dim));
    }
    symplectic_basis_of(space, Subspace::whole(space).basis())
}

/// Conjugates p_1..p_k for an independent isotropic family q_1..q_k.
pub fn complete_to_symplectic<S: Scalar>(
    space: &SymplecticSpace<S>,
    qs: &[Vec<S>],
) -> Result<Vec<Vec<S>>> {
    for q in qs {
        space.check(q)?;
    }
    if space.rank_of(qs) != qs.len() {
        return Err(Error::Dependent);
    }
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            if !space.sigma_vanishes(&qs[i], &qs[j]) {
                return Err(Error::NotIsotropic(i, j));
            }
        }
    }
    let mut ps: Vec<Vec<S>> = Vec::new();
    for j in 0..qs.len() {
        let rows: Vec<Vec<S>> = qs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, q)| space.sigma_row(q))
            .chain(ps.iter().map(|p| space.sigma_row(p)))
            .collect();
        let cands = S::nullspace(&rows, space.dim, space.tol);
        let r = cands
            .into_iter()
            .find(|r| !space.sigma_vanishes(r, &qs[j]))
            .ok_or(Error::Degenerate)?;
        let s = space.sigma_unchecked(&r, &qs[j]);
        ps.push(scale(&r, &(S::one() / s)));
    }
    Ok(ps)
}

/// {f : σ(f, s) = 0}.
pub fn symplectic_complement<S: Scalar>(
    space: &SymplecticSpace<S>,
    s: &Subspace<S>,
) -> Subspace<S> {
    let rows: Vec<Vec<S>> = s.basis.iter().map(|b| space.sigma_row(b)).collect();
    Subspace {
        basis: S::nullspace(&rows, space.dim, space.tol),
    }
}

/// The radical s ∩ s^⊥.
pub fn radical<S: Scalar>(space: &SymplecticSpace<S>, s: &Subspace<S>) -> Subspace<S> {
    restrict_annihilator(space, &s.basis, &s.basis)
}

/// {v ∈ span(a) : σ(v, w) = 0 for all w ∈ ann}.
fn restrict_annihilator<S: Scalar>(
    space: &SymplecticSpace<S>,
    a: &[Vec<S>],
    ann: &[Vec<S>],
) -> Subspace<S> {
    let rows: Vec<Vec<S>> = ann
        .iter()
        .map(|w| a.iter().map(|v| space.sigma_unchecked(v, w)).collect())
        .collect();
    let coeffs = S::nullspace(&rows, a.len(), space.tol);
    let basis = coeffs
        .iter()
        .map(|c| {
            let mut v = vec![S::zero(); space.dim];
            for (ci, ai) in c.iter().zip(a) {
                axpy(&mut v, ci, ai);
            }
            v
        })
        .collect();
    Subspace { basis }
}

/// Unique splitting v = v_S + v_⊥ for a nondegenerate subspace s.
pub fn split<S: Scalar>(
    space: &SymplecticSpace<S>,
    s: &Subspace<S>,
    v: &[S],
) -> Result<(Vec<S>, Vec<S>)> {
    space.check(v)?;
    let b = symplectic_basis_of(space, &s.basis)?;
    if 2 * b.modes() != s.dim() {
        return Err(Error::Degenerate);
    }
    let vs = project(space, &b.q, &b.p, v);
    let perp = minus(v, &vs);
    Ok((vs, perp))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityDecomposition<S: Scalar> {
    pub q: Subspace<S>,
    pub reg: Subspace<S>,
    pub sing: Subspace<S>,
}

/// X = Q ⊕ (Q^⊥ ∩ X_R) ⊕ (Q^⊥ ∩ X_R^⊥) with Q spanned by X_T and conjugates.
///
/// Requires X_T ⊆ X_R, σ(X_T, X_R) = 0 and X_T equal to the radical X_R ∩ X_R^⊥.
pub fn regularity_decomposition<S: Scalar>(
    space: &SymplecticSpace<S>,
    x_r: &Subspace<S>,
    x_t: &Subspace<S>,
) -> Result<RegularityDecomposition<S>> {
    let bad = |m: &str| Err(Error::InconsistentRegularity(m.to_string()));
    for t in &x_t.basis {
        if !x_r.contains(space, t) {
            return bad("x_t is not contained in x_r");
        }
    }
    for t in &x_t.basis {
        for r in &x_r.basis {
            if !space.sigma_vanishes(t, r) {
                return bad("sigma(x_t, x_r) != 0");
            }
        }
    }
    let gram = space.gram(&x_r.basis);
    let radical = x_r.dim() - S::rank(&gram, x_r.dim(), space.tol);
    if radical != x_t.dim() {
        return bad("x_t differs from the radical x_r ∩ x_r^⊥");
    }
    let conj = complete_to_symplectic(space, &x_t.basis)?;
    let q_basis: Vec<Vec<S>> = x_t
        .basis
        .iter()
        .zip(&conj)
        .flat_map(|(t, p)| [t.clone(), p.clone()])
        .collect();
    let reg = restrict_annihilator(space, &x_r.basis, &q_basis);
    let xr_perp = symplectic_complement(space, x_r);
    let sing = restrict_annihilator(space, &xr_perp.basis, &q_basis);
    let q = Subspace { basis: q_basis };
    if q.dim() + reg.dim() + sing.dim() != space.dim {
        return bad("components do not sum to the whole space");
    }
    let mut all = q.basis.clone();
    all.extend(reg.basis.iter().cloned());
    all.extend(sing.basis.iter().cloned());
    if space.rank_of(&all) != space.dim {
        return bad("components are not independent");
    }
    Ok(RegularityDecomposition { q, reg, sing })
}

/// Whether the three components are independent, span X and are pairwise σ-orthogonal.
pub fn verify_decomposition<S: Scalar>(
    space: &SymplecticSpace<S>,
    d: &RegularityDecomposition<S>,
) -> bool {
    let mut all = d.q.basis.clone();
    all.extend(d.reg.basis.iter().cloned());
    all.extend(d.sing.basis.iter().cloned());
    if all.len() != space.dim || space.rank_of(&all) != space.dim {
        return false;
    }
    let orth = |a: &Subspace<S>, b: &Subspace<S>| {
        a.basis
            .iter()
            .all(|u| b.basis.iter().all(|v| space.sigma_vanishes(u, v)))
    };
    orth(&d.q, &d.reg) && orth(&d.q, &d.sing) && orth(&d.reg, &d.sing)
}

/// Maximum deviation of the Gram matrix of an ordered {q_i, p_i} list from the
/// canonical block form (0 means exact).
pub fn canonical_gram_defect<S: Scalar>(space: &SymplecticSpace<S>, b: &SymplecticBasis<S>) -> f64 {
    let mut worst = 0.0f64;
    let n = b.modes();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let pq = space.sigma_unchecked(&b.p[i], &b.q[j]);
            let qq = space.sigma_unchecked(&b.q[i], &b.q[j]);
            let pp = space.sigma_unchecked(&b.p[i], &b.p[j]);
            worst = worst
                .max((pq.to_f64() - target).abs())
                .max(qq.to_f64().abs())
                .max(pp.to_f64().abs());
            if S::EXACT && (pq != S::from_i64(target as i64) || !qq.is_zero() || !pp.is_zero()) {
                worst = worst.max(f64::MIN_POSITIVE);
            }
        }
    }
    worst
}

/// Checks Tᵀ·form·T = form (T acts on coordinate columns: (Tf)_i = Σ_j T_ij f_j).
pub fn symplectic_defect<S: Scalar>(space: &SymplecticSpace<S>, t: &[Vec<S>]) -> Result<f64> {
    if t.len() != space.dim || t.iter().any(|r| r.len() != space.dim) {
        return Err(Error::DimensionMismatch {
            expected: space.dim,
            got: t.len(),
        });
    }
    let cols: Vec<Vec<S>> = (0..space.dim)
        .map(|j| t.iter().map(|r| r[j].clone()).collect())
        .collect();
    let g = space.gram(&cols);
    let mut worst = 0.0f64;
    for i in 0..space.dim {
        for j in 0..space.dim {
            let d = g[i][j].clone() - space.form[i][j].clone();
            if !d.is_zero() {
                worst = worst.max(d.to_f64().abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(worst)
}

pub fn apply_matrix<S: Scalar>(t: &[Vec<S>], f: &[S]) -> Vec<S> {
    t.iter()
        .map(|row| {
            row.iter()
                .zip(f)
                .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}

/// A space with a random antisymmetric integer form (entries in −3..=3),
/// redrawn until it is nondegenerate.
pub fn random_exact_space<R: rand::Rng>(rng: &mut R, dim: usize) -> Result<ExactSpace> {
    if dim == 0 || dim % 2 == 1 {
        return Err(Error::OddDimension(dim));
    }
    loop {
        let mut form = vec![vec![rat(0, 1); dim]; dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let a: i64 = rng.gen_range(-3..=3);
                form[i][j] = rat(a, 1);
                form[j][i] = rat(-a, 1);
            }
        }
        match ExactSpace::new(form) {
            Ok(s) => return Ok(s),
            Err(Error::Degenerate) => continue,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64) -> BigRational {
        rat(n, 1)
    }

    fn unit(d: usize, i: usize) -> Vec<BigRational> {
        (0..d).map(|j| if i == j { r(1) } else { r(0) }).collect()
    }

    fn random_unimodular(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<BigRational>> {
        // product of elementary shears, exactly invertible
        let mut t: Vec<Vec<BigRational>> = (0..d).map(|i| unit(d, i)).collect();
        for _ in 0..3 * d {
            let i = rng.gen_range(0..d);
            let j = rng.gen_range(0..d);
            if i == j {
                continue;
            }
            let a = r(rng.gen_range(-2..=2));
            for k in 0..d {
                let add = a.clone() * t[j][k].clone();
                t[i][k] = t[i][k].clone() + add;
            }
        }
        t
    }

    #[test]
    fn sigma_on_standard_plane() {
        let s = ExactSpace::standard(1);
        assert_eq!(s.sigma(&[r(1), r(0)], &[r(0), r(1)]).unwrap(), r(1));
        assert_eq!(s.sigma(&[r(3), r(5)], &[r(3), r(5)]).unwrap(), r(0));
        assert!(s.sigma(&[r(1)], &[r(0), r(1)]).is_err());
    }

    #[test]
    fn sigma_antisymmetric_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = ExactSpace::standard(2);
        for _ in 0..100 {
            let f: Vec<_> = (0..4)
                .map(|_| rat(rng.gen_range(-9..9), rng.gen_range(1..5)))
                .collect();
            let g: Vec<_> = (0..4)
                .map(|_| rat(rng.gen_range(-9..9), rng.gen_range(1..5)))
                .collect();
            assert_eq!(s.sigma(&f, &g).unwrap(), -s.sigma(&g, &f).unwrap());
        }
    }

    #[test]
    fn rejects_bad_forms() {
        assert_eq!(
            ExactSpace::new(vec![vec![r(0), r(1)], vec![r(1), r(0)]]),
            Err(Error::NotAntisymmetric)
        );
        assert_eq!(
            ExactSpace::new(vec![vec![r(0), r(0)], vec![r(0), r(0)]]),
            Err(Error::Degenerate)
        );
        let odd = vec![
            vec![r(0), r(1), r(0)],
            vec![r(-1), r(0), r(1)],
            vec![r(0), r(-1), r(0)],
        ];
        assert_eq!(ExactSpace::new(odd), Err(Error::Degenerate));
    }

    #[test]
    fn standard_plane_basis() {
        let s = ExactSpace::standard(1);
        let b = symplectic_basis(&s).unwrap();
        assert_eq!(b.p[0], vec![r(1), r(0)]);
        assert_eq!(b.q[0], vec![r(0), r(1)]);
        assert_eq!(canonical_gram_defect(&s, &b), 0.0);
    }

    #[test]
    fn odd_dimension_has_no_basis() {
        let s = FloatSpace::standard(1);
        let three = Subspace::whole(&FloatSpace::standard(2));
        let gens: Vec<Vec<f64>> = three.basis()[..3].to_vec();
        assert_eq!(
            symplectic_basis_of(&s, &[vec![1.0, 0.0]]),
            Err(Error::OddDimension(1))
        );
        assert!(matches!(
            symplectic_basis_of(&FloatSpace::standard(2), &gens),
            Err(Error::OddDimension(3))
        ));
    }

    #[test]
    fn conjugated_form_yields_canonical_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = random_unimodular(&mut rng, 4);
        let s = ExactSpace::standard(2).pullback(&t).unwrap();
        let b = symplectic_basis(&s).unwrap();
        assert_eq!(canonical_gram_defect(&s, &b), 0.0);
        assert_eq!(s.rank_of(&b.ordered()), 4);
    }

    #[test]
    fn complete_single_isotropic_vector() {
        let s = ExactSpace::standard(2);
        let q1 = unit(4, 0);
        let ps = complete_to_symplectic(&s, std::slice::from_ref(&q1)).unwrap();
        assert_eq!(s.sigma(&ps[0], &q1).unwrap(), r(1));
    }

    #[test]
    fn complete_q_part_of_existing_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_unimodular(&mut rng, 6);
        let s = ExactSpace::standard(3).pullback(&t).unwrap();
        let b = symplectic_basis(&s).unwrap();
        let ps = complete_to_symplectic(&s, &b.q).unwrap();
        let nb = SymplecticBasis {
            q: b.q.clone(),
            p: ps,
        };
        assert_eq!(canonical_gram_defect(&s, &nb), 0.0);
    }

    #[test]
    fn complete_rejects_dependent_and_non_isotropic() {
        let s = ExactSpace::standard(2);
        let f = vec![r(1), r(2), r(0), r(1)];
        let f2: Vec<_> = f.iter().map(|x| x * r(2)).collect();
        assert_eq!(complete_to_symplectic(&s, &[f, f2]), Err(Error::Dependent));
        assert_eq!(
            complete_to_symplectic(&s, &[unit(4, 0), unit(4, 1)]),
            Err(Error::NotIsotropic(0, 1))
        );
    }

    #[test]
    fn complement_examples() {
        let s = ExactSpace::standard(2);
        let sub = Subspace::new(&s, vec![unit(4, 0), unit(4, 1)]).unwrap();
        let c = symplectic_complement(&s, &sub);
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&s, &unit(4, 2)) && c.contains(&s, &unit(4, 3)));
        assert_eq!(symplectic_complement(&s, &Subspace::whole(&s)).dim(), 0);
    }

    #[test]
    fn complement_of_random_plane_in_r6() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = ExactSpace::standard(3);
        let mut found = 0;
        while found < 20 {
            let a: Vec<_> = (0..6).map(|_| r(rng.gen_range(-3..4))).collect();
            let b: Vec<_> = (0..6).map(|_| r(rng.gen_range(-3..4))).collect();
            let Ok(sub) = Subspace::new(&s, vec![a, b]) else {
                continue;
            };
            if !sub.is_nondegenerate(&s) {
                continue;
            }
            found += 1;
            let c = symplectic_complement(&s, &sub);
            assert_eq!(c.dim(), 4);
            for u in sub.basis() {
                for v in c.basis() {
                    assert!(s.sigma(u, v).unwrap().is_zero());
                }
            }
            let mut all = sub.basis().to_vec();
            all.extend(c.basis().iter().cloned());
            assert_eq!(s.rank_of(&all), 6);
        }
    }

    #[test]
    fn regularity_fully_regular() {
        let s = ExactSpace::standard(2);
        let d = regularity_decomposition(&s, &Subspace::whole(&s), &Subspace::zero()).unwrap();
        assert_eq!((d.q.dim(), d.reg.dim(), d.sing.dim()), (0, 4, 0));
    }

    #[test]
    fn regularity_isotropic_line() {
        let s = ExactSpace::standard(2);
        let line = Subspace::new(&s, vec![unit(4, 0)]).unwrap();
        let d = regularity_decomposition(&s, &line, &line).unwrap();
        assert_eq!((d.q.dim(), d.reg.dim(), d.sing.dim()), (2, 0, 2));
        assert!(d.q.contains(&s, &unit(4, 0)) && d.q.contains(&s, &unit(4, 1)));
        assert!(d.sing.contains(&s, &unit(4, 2)) && d.sing.contains(&s, &unit(4, 3)));
    }

    #[test]
    fn regularity_rejects_non_orthogonal_data() {
        let s = ExactSpace::standard(2);
        let xr = Subspace::new(&s, vec![unit(4, 0), unit(4, 1)]).unwrap();
        let xt = Subspace::new(&s, vec![unit(4, 0)]).unwrap();
        assert!(matches!(
            regularity_decomposition(&s, &xr, &xt),
            Err(Error::InconsistentRegularity(_))
        ));
    }

    #[test]
    fn float_mode_basis_close_to_canonical() {
        let form = vec![
            vec![0.0, 0.3, 1.2, -0.5],
            vec![-0.3, 0.0, 0.7, 2.0],
            vec![-1.2, -0.7, 0.0, 0.4],
            vec![0.5, -2.0, -0.4, 0.0],
        ];
        let s = FloatSpace::new(form).unwrap();
        let b = symplectic_basis(&s).unwrap();
        assert!(canonical_gram_defect(&s, &b) < 1e-10);
    }

    #[test]
    fn symplectic_defect_detects_scaling() {
        let s = ExactSpace::standard(1);
        let two = vec![vec![r(2), r(0)], vec![r(0), r(2)]];
        assert!(symplectic_defect(&s, &two).unwrap() > 0.0);
        let rot = vec![vec![r(0), r(-1)], vec![r(1), r(0)]];
        assert_eq!(symplectic_defect(&s, &rot).unwrap(), 0.0);
    }

    fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-4i64..=4, d)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn split_reassembles(a in vec_strategy(4), b in vec_strategy(4), v in vec_strategy(4)) {
            let s = ExactSpace::standard(2);
            let a: Vec<_> = a.into_iter().map(r).collect();
            let b: Vec<_> = b.into_iter().map(r).collect();
            let sub = match Subspace::new(&s, vec![a, b]) { Ok(x) => x, Err(_) => return Ok(()) };
            prop_assume!(sub.is_nondegenerate(&s));
            let v: Vec<_> = v.into_iter().map(r).collect();
            let (vs, vp) = split(&s, &sub, &v).unwrap();
            let back: Vec<_> = vs.iter().zip(&vp).map(|(x, y)| x + y).collect();
            prop_assert_eq!(back, v);
            prop_assert!(sub.contains(&s, &vs));
            for u in sub.basis() {
                prop_assert!(s.sigma(u, &vp).unwrap().is_zero());
            }
        }

        #[test]
        fn float_split_reassembles(v in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let s = FloatSpace::standard(3);
            let sub = Subspace::new(&s, vec![
                vec![1.0, 0.5, 0.0, 0.0, 0.2, 0.0],
                vec![0.0, 1.0, 0.3, 0.0, 0.0, 0.0],
            ]).unwrap();
            let (vs, vp) = split(&s, &sub, &v).unwrap();
            for i in 0..6 {
                prop_assert!((vs[i] + vp[i] - v[i]).abs() < 1e-10);
            }
            for u in sub.basis() {
                prop_assert!(s.sigma(u, &vp).unwrap().abs() < 1e-10);
            }
        }

        #[test]
        fn regularity_outputs_orthogonal(seed in 0u64..10_000, k in 0usize..3, extra in 0usize..2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_unimodular(&mut rng, 6);
            let s = ExactSpace::standard(3).pullback(&t).unwrap();
            let b = symplectic_basis(&s).unwrap();
            // x_t = first k q's, x_r = x_t plus `extra` full symplectic pairs
            let k = k.min(3);
            let extra = extra.min(3 - k);
            let xt: Vec<_> = b.q[..k].to_vec();
            let mut xr = xt.clone();
            for j in k..k + extra {
                xr.push(b.q[j].clone());
                xr.push(b.p[j].clone());
            }
            let xt = Subspace::new(&s, xt).unwrap();
            let xr = Subspace::new(&s, xr).unwrap();
            let d = regularity_decomposition(&s, &xr, &xt).unwrap();
            prop_assert_eq!(d.q.dim() + d.reg.dim() + d.sing.dim(), 6);
            for (x, y) in [(&d.q, &d.reg), (&d.q, &d.sing), (&d.reg, &d.sing)] {
                for u in x.basis() {
                    for v in y.basis() {
                        prop_assert!(s.sigma(u, v).unwrap().is_zero());
                    }
                }
            }
        }
    }
}
