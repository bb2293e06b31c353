//! Two-tier identity checking: bounded rewriting, then the Fock oracle.

use super::poly::{Poly, Q};
use super::rewrite::{simplify, NormalizationStatus, SimplifyOptions};
use crate::error::{Error, Result};
use crate::fockrep::TruncatedRep;
use crate::symplin::SymplecticSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    NumericallyConfirmed,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub simplify: SimplifyOptions,
    /// Increasing cutoffs; defaults depend on the number of modes.
    pub cutoffs: Option<Vec<usize>>,
    /// Residuals are measured on levels below cutoff / `level_fraction` per mode.
    pub level_fraction: usize,
    pub confirm_tol: f64,
    pub refute_tol: f64,
    /// Residuals below this count as zero when comparing cutoffs.
    pub floor: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            simplify: SimplifyOptions::default(),
            cutoffs: None,
            level_fraction: 4,
            confirm_tol: 1e-6,
            refute_tol: 1e-3,
            floor: 1e-12,
        }
    }
}

pub fn default_cutoffs(modes: usize) -> Vec<usize> {
    match modes {
        0 | 1 => vec![64, 128],
        2 => vec![32, 64],
        3 => vec![12, 16],
        _ => vec![6, 8],
    }
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub verdict: Verdict,
    pub status: NormalizationStatus,
    pub steps: usize,
    /// simplify(lhs − rhs).
    pub remainder: Poly,
    /// (cutoff, compressed residual norm), empty if proved symbolically.
    pub residuals: Vec<(usize, f64)>,
}

/// Classifies a sequence of residuals at increasing cutoffs.
pub fn classify_residuals(res: &[f64], cfg: &OracleConfig) -> Verdict {
    let (Some(&first), Some(&last)) = (res.first(), res.last()) else {
        return Verdict::Inconclusive;
    };
    if res.len() < 2 {
        return Verdict::Inconclusive;
    }
    let decreasing = last <= cfg.floor || last < first;
    if last < cfg.confirm_tol && res.iter().all(|&r| r < cfg.confirm_tol) && decreasing {
        return Verdict::NumericallyConfirmed;
    }
    if res.iter().all(|&r| r > cfg.refute_tol) && last > 0.5 * first {
        return Verdict::Refuted;
    }
    Verdict::Inconclusive
}

pub fn check_identity(
    lhs: &Poly,
    rhs: &Poly,
    space: &SymplecticSpace<Q>,
    cfg: &OracleConfig,
) -> Result<IdentityCheck> {
    lhs.check_dim(space.dim())?;
    rhs.check_dim(space.dim())?;
    let diff = lhs.sub(rhs);
    let s = simplify(&diff, space, &cfg.simplify)?;
    if s.poly.is_zero() {
        return Ok(IdentityCheck {
            verdict: Verdict::Proved,
            status: s.status,
            steps: s.steps,
            remainder: s.poly,
            residuals: Vec::new(),
        });
    }
    let modes = space.dim() / 2;
    let cutoffs = cfg
        .cutoffs
        .clone()
        .unwrap_or_else(|| default_cutoffs(modes));
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) || cfg.level_fraction == 0 {
        return Err(Error::InvalidArgument(
            "cutoffs must be strictly increasing".into(),
        ));
    }
    let mut residuals = Vec::with_capacity(cutoffs.len());
    for &n in &cutoffs {
        let rep = TruncatedRep::from_exact(space, n)?;
        let limit = (n / cfg.level_fraction).max(1);
        residuals.push((n, rep.compressed_poly_norm(&s.poly, limit)?));
    }
    let values: Vec<f64> = residuals.iter().map(|r| r.1).collect();
    Ok(IdentityCheck {
        verdict: classify_residuals(&values, cfg),
        status: s.status,
        steps: s.steps,
        remainder: s.poly,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::super::poly::cq_int;
    use super::*;
    use crate::symplin::ExactSpace;

    fn r(z: i64, f: &[i64]) -> Poly {
        Poly::resolvent(
            cq_int(z, 0),
            f.iter().map(|&x| super::super::poly::q(x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn adjoint_relation_is_proved() {
        let s = ExactSpace::standard(1);
        let a = r(1, &[1, 0]);
        let lhs = a.sub(&a.adjoint());
        let rhs = a.mul(&a.adjoint()).scale(&cq_int(0, -2));
        let out = check_identity(&lhs, &rhs, &s, &OracleConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Proved);
    }

    #[test]
    fn squared_sandwich_is_proved() {
        let s = ExactSpace::standard(1);
        let (a, b) = (r(1, &[1, 0]), r(2, &[0, 1]));
        let lhs = a.mul(&b).mul(&b).mul(&a);
        let rhs = b.mul(&a).mul(&a).mul(&b);
        let out = check_identity(&lhs, &rhs, &s, &OracleConfig::default()).unwrap();
        assert!(matches!(
            out.verdict,
            Verdict::Proved | Verdict::NumericallyConfirmed
        ));
    }

    #[test]
    fn false_commutation_is_refuted() {
        let s = ExactSpace::standard(1);
        let (a, b) = (r(1, &[0, 1]), r(1, &[1, 0]));
        let cfg = OracleConfig {
            simplify: SimplifyOptions {
                budget: 40,
                ..Default::default()
            },
            ..Default::default()
        };
        let out = check_identity(&a.mul(&b), &b.mul(&a), &s, &cfg).unwrap();
        assert_eq!(out.verdict, Verdict::Refuted, "{:?}", out.residuals);
        let (r0, r1) = (out.residuals[0].1, out.residuals[1].1);
        assert!((r0 - r1).abs() < 1e-3 * r0, "{r0} {r1}");
    }

    #[test]
    fn classification_rules() {
        let cfg = OracleConfig::default();
        assert_eq!(
            classify_residuals(&[1e-8, 1e-10], &cfg),
            Verdict::NumericallyConfirmed
        );
        assert_eq!(
            classify_residuals(&[1e-13, 1e-13], &cfg),
            Verdict::NumericallyConfirmed
        );
        assert_eq!(
            classify_residuals(&[1e-8, 1e-7], &cfg),
            Verdict::Inconclusive
        );
        assert_eq!(classify_residuals(&[0.3, 0.3], &cfg), Verdict::Refuted);
        assert_eq!(
            classify_residuals(&[0.3, 0.01], &cfg),
            Verdict::Inconclusive
        );
        assert_eq!(classify_residuals(&[0.3], &cfg), Verdict::Inconclusive);
    }
}
