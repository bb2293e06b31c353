use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::symplin::{Scalar, SymplecticSpace};

pub type Q = BigRational;
pub type CQ = Complex<BigRational>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn cq(re: Q, im: Q) -> CQ {
    Complex::new(re, im)
}

pub fn cq_int(re: i64, im: i64) -> CQ {
    cq(q(re), q(im))
}

pub fn cq_from_c64(z: Complex64) -> CQ {
    cq(Q::from_f64(z.re), Q::from_f64(z.im))
}

pub fn cq_to_c64(z: &CQ) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

fn i_unit() -> CQ {
    cq(Q::zero(), Q::one())
}

/// A generator R(z, f) in canonical form: the first nonzero coordinate of f is 1.
///
/// Ordering is lexicographic on (f, Re z, Im z).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub f: Vec<Q>,
    pub re: Q,
    pub im: Q,
}

impl Generator {
    pub fn z(&self) -> CQ {
        cq(self.re.clone(), self.im.clone())
    }

    pub fn z_f64(&self) -> Complex64 {
        cq_to_c64(&self.z())
    }

    pub fn f_f64(&self) -> Vec<f64> {
        self.f.iter().map(|x| x.to_f64()).collect()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f: Vec<String> = self.f.iter().map(|x| x.to_string()).collect();
        write!(
            out,
            "R({}{}{}i, [{}])",
            self.re,
            if self.im.is_negative() { "-" } else { "+" },
            self.im.abs(),
            f.join(",")
        )
    }
}

/// Result of bringing R(z, f) to canonical form.
pub enum Canonical {
    Scalar(CQ),
    Scaled(CQ, Generator),
}

/// Applies R(z,0) = −(i/z)𝟙 and νR(νz,νf) = R(z,f) with ν the leading coordinate of f.
pub fn canonicalize(z: CQ, f: Vec<Q>) -> Result<Canonical> {
    if z.re.is_zero() {
        return Err(Error::ImaginaryParameter);
    }
    let Some(k) = f.iter().position(|x| !x.is_zero()) else {
        return Ok(Canonical::Scalar(-i_unit() / z));
    };
    let nu = f[k].clone();
    let f: Vec<Q> = f.iter().map(|x| x / &nu).collect();
    let z = cq(&z.re / &nu, &z.im / &nu);
    Ok(Canonical::Scaled(
        cq(nu.recip(), Q::zero()),
        Generator {
            f,
            re: z.re,
            im: z.im,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: CQ,
    pub factors: Vec<Generator>,
}

impl Monomial {
    pub fn coeff_f64(&self) -> Complex64 {
        cq_to_c64(&self.coeff)
    }
}

/// Finite linear combination of ordered generator products with merged terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<Generator>, CQ>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::scalar(cq_int(1, 0))
    }

    pub fn scalar(c: CQ) -> Self {
        let mut p = Poly::zero();
        p.add_term(c, Vec::new());
        p
    }

    /// The element R(z, f), canonicalized.
    pub fn resolvent(z: CQ, f: Vec<Q>) -> Result<Self> {
        Poly::monomial(cq_int(1, 0), vec![(z, f)])
    }

    /// Real-parameter convenience: R(λ, f) from floats, converted exactly.
    pub fn resolvent_f64(lambda: f64, f: &[f64]) -> Result<Self> {
        Poly::resolvent(
            cq(Q::from_f64(lambda), Q::zero()),
            f.iter().map(|&x| Q::from_f64(x)).collect(),
        )
    }

    /// coeff · ∏ R(z_k, f_k) from raw (uncanonicalized) factors.
    pub fn monomial(coeff: CQ, factors: Vec<(CQ, Vec<Q>)>) -> Result<Self> {
        let mut c = coeff;
        let mut gens = Vec::with_capacity(factors.len());
        for (z, f) in factors {
            match canonicalize(z, f)? {
                Canonical::Scalar(s) => c *= s,
                Canonical::Scaled(s, g) => {
                    c *= s;
                    gens.push(g);
                }
            }
        }
        let mut p = Poly::zero();
        p.add_term(c, gens);
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, c: CQ, factors: Vec<Generator>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&factors) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&factors);
                }
            }
            None => {
                self.terms.insert(factors, c);
            }
        }
    }

    pub(crate) fn remove_term(&mut self, factors: &[Generator]) -> Option<CQ> {
        self.terms.remove(factors)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Generator>, &CQ)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(f, c)| Monomial {
                coeff: c.clone(),
                factors: f.clone(),
            })
            .collect()
    }

    pub fn from_monomials(ms: &[Monomial]) -> Self {
        let mut p = Poly::zero();
        for m in ms {
            p.add_term(m.coeff.clone(), m.factors.clone());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest number of factors in a term.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(Vec::len).sum()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        for g in self.terms.keys().flatten() {
            if g.f.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.f.len(),
                });
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: &CQ) -> Poly {
        let mut p = Poly::zero();
        for (f, v) in &self.terms {
            p.add_term(v.clone() * c.clone(), f.clone());
        }
        p
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (f, v) in &other.terms {
            p.add_term(v.clone(), f.clone());
        }
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&cq_int(-1, 0)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (fa, va) in &self.terms {
            for (fb, vb) in &other.terms {
                let mut f = fa.clone();
                f.extend(fb.iter().cloned());
                p.add_term(va.clone() * vb.clone(), f);
            }
        }
        p
    }

    pub fn pow(&self, n: usize) -> Poly {
        let mut p = Poly::one();
        for _ in 0..n {
            p = p.mul(self);
        }
        p
    }

    /// Involution: reverses products, conjugates coefficients, z ↦ −z̄.
    pub fn adjoint(&self) -> Poly {
        let mut p = Poly::zero();
        for (f, v) in &self.terms {
            let rev: Vec<Generator> = f
                .iter()
                .rev()
                .map(|g| Generator {
                    f: g.f.clone(),
                    re: -g.re.clone(),
                    im: g.im.clone(),
                })
                .collect();
            p.add_term(v.conj(), rev);
        }
        p
    }

    /// Generator-wise substitution g ↦ map(g), where map returns a raw (z, f).
    pub fn map_generators<F: Fn(&Generator) -> (CQ, Vec<Q>)>(&self, map: F) -> Result<Poly> {
        let mut p = Poly::zero();
        for (fs, v) in &self.terms {
            let raw: Vec<(CQ, Vec<Q>)> = fs.iter().map(&map).collect();
            p = p.add(&Poly::monomial(v.clone(), raw)?);
        }
        Ok(p)
    }

    /// α_T(R(z,f)) = R(z, Tf) for symplectic T (rows act on coordinate columns).
    pub fn apply_symplectic_automorphism(
        &self,
        space: &SymplecticSpace<Q>,
        t: &[Vec<Q>],
    ) -> Result<Poly> {
        self.check_dim(space.dim())?;
        let defect = crate::symplin::symplectic_defect(space, t)?;
        if defect != 0.0 {
            return Err(Error::NotSymplectic(defect));
        }
        self.map_generators(|g| (g.z(), crate::symplin::apply_matrix(t, &g.f)))
    }

    /// β_h(R(z,f)) = R(z + i h(f), f) for a real covector h.
    pub fn apply_shift_automorphism(&self, h: &[Q]) -> Result<Poly> {
        self.check_dim(h.len())?;
        self.map_generators(|g| {
            let hf = g.f.iter().zip(h).fold(Q::zero(), |a, (x, y)| a + x * y);
            (cq(g.re.clone(), &g.im + hf), g.f.clone())
        })
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| cq_to_c64(c).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let mut first = true;
        for (fs, c) in &self.terms {
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            write!(
                out,
                "({}{}{}i)",
                c.re,
                if c.im.is_negative() { "-" } else { "+" },
                c.im.abs()
            )?;
            for g in fs {
                write!(out, "·{g}")?;
            }
        }
        Ok(())
    }
}

/// Von Neumann expansion R(λ,f) ≈ Σ_{n≤K} (λ₀−λ)ⁿ iⁿ R(λ₀,f)^{n+1} with the
/// geometric tail bound Σ_{n>K} |λ₀−λ|ⁿ / |λ₀|^{n+1}.
pub fn von_neumann_expand(lambda: &Q, lambda0: &Q, f: &[Q], order: usize) -> Result<(Poly, f64)> {
    if lambda.is_zero() || lambda0.is_zero() {
        return Err(Error::ImaginaryParameter);
    }
    let d = lambda0 - lambda;
    let ratio = (d.abs() / lambda0.abs()).to_f64();
    if d.abs() >= lambda0.abs() {
        return Err(Error::OutsideDisk {
            dist: d.abs().to_f64(),
            radius: lambda0.abs().to_f64(),
        });
    }
    let base = Poly::resolvent(cq(lambda0.clone(), Q::zero()), f.to_vec())?;
    let step = cq(Q::zero(), d.clone());
    let mut sum = Poly::zero();
    let mut coeff = cq_int(1, 0);
    let mut power = base.clone();
    for n in 0..=order {
        if n > 0 {
            coeff *= step.clone();
            power = power.mul(&base);
        }
        sum = sum.add(&power.scale(&coeff));
        if d.is_zero() {
            break;
        }
    }
    let l0 = lambda0.abs().to_f64();
    let tail = if d.is_zero() {
        0.0
    } else {
        ratio.powi(order as i32 + 1) / (1.0 - ratio) / l0
    };
    Ok((sum, tail))
}
