use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fockrep::TruncatedRep;
use crate::linalg::{c, op_norm, CMat};
use crate::resolvsym::{cq, cq_to_c64, Monomial, Poly, CQ, Q};
use crate::symplin::{ExactSpace, Subspace};

/// First-class constraint subspace C with σ(C, C) = 0.
#[derive(Debug, Clone)]
pub struct DiracConstraintSet {
    c: Subspace<Q>,
}

impl DiracConstraintSet {
    pub fn new(space: &ExactSpace, c: Subspace<Q>) -> Result<Self> {
        if c.dim() == 0 {
            return Err(Error::InvalidConstraint(
                "constraint subspace must be nonzero".into(),
            ));
        }
        for (i, a) in c.basis().iter().enumerate() {
            for b in &c.basis()[i + 1..] {
                if !space.sigma(a, b)?.is_zero() {
                    return Err(Error::InvalidConstraint(
                        "σ(C, C) ≠ 0: constraints are not first class".into(),
                    ));
                }
            }
        }
        Ok(DiracConstraintSet { c })
    }

    pub fn subspace(&self) -> &Subspace<Q> {
        &self.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiracValue {
    Value(CQ),
    /// Depends on the chosen extension off the constraint algebra.
    Undetermined,
}

impl DiracValue {
    pub fn to_c64(&self) -> Option<Complex64> {
        match self {
            DiracValue::Value(v) => Some(cq_to_c64(v)),
            DiracValue::Undetermined => None,
        }
    }
}

/// Value of a Dirac state on a monomial: 0 if a factor fails to σ-commute with C,
/// the character ∏ 1/(iλ_k) if every factor lies in span C, otherwise undetermined.
pub fn dirac_state_value(
    c: &DiracConstraintSet,
    m: &Monomial,
    space: &ExactSpace,
) -> Result<DiracValue> {
    let mut kills = false;
    let mut inside = true;
    for g in &m.factors {
        space.check(&g.f)?;
        if !g.im.is_zero() {
            return Err(Error::InvalidArgument(
                "Dirac values need real spectral parameters".into(),
            ));
        }
        for b in c.subspace().basis() {
            if !space.sigma(&g.f, b)?.is_zero() {
                kills = true;
            }
        }
        if !c.subspace().contains(space, &g.f) {
            inside = false;
        }
    }
    if kills {
        return Ok(DiracValue::Value(cq(Q::zero(), Q::zero())));
    }
    if !inside {
        return Ok(DiracValue::Undetermined);
    }
    let mut v = m.coeff.clone();
    for g in &m.factors {
        v /= cq(Q::zero(), g.re.clone());
    }
    Ok(DiracValue::Value(v))
}

/// Linear extension over the terms of `p`; undetermined if any term is.
pub fn dirac_poly_value(
    c: &DiracConstraintSet,
    p: &Poly,
    space: &ExactSpace,
) -> Result<DiracValue> {
    let mut total = cq(Q::zero(), Q::zero());
    let mut undetermined = false;
    for m in p.monomials() {
        match dirac_state_value(c, &m, space)? {
            DiracValue::Value(v) => total += v,
            DiracValue::Undetermined => undetermined = true,
        }
    }
    Ok(if undetermined {
        DiracValue::Undetermined
    } else {
        DiracValue::Value(total)
    })
}

/// ‖i(R(μ+h,g) − R(μ−h,g))/(2h) − R(μ,g)²‖ in the truncated representation.
pub fn dirac_derivative_check(rep: &TruncatedRep, mu: f64, g: &[f64], h: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::ImaginaryParameter);
    }
    if h <= 0.0 || h >= mu.abs() {
        return Err(Error::InvalidArgument(
            "step must satisfy 0 < h < |μ|".into(),
        ));
    }
    let plus = rep.resolvent_matrix(c(mu + h, 0.0), g)?;
    let minus = rep.resolvent_matrix(c(mu - h, 0.0), g)?;
    let r = rep.resolvent_matrix(c(mu, 0.0), g)?;
    let diff: CMat = (plus - minus) * c(0.0, 0.5 / h) - &r * &r;
    Ok(op_norm(&diff))
}
