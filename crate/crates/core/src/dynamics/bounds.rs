//! Finite-volume commutator bounds for the lattice Dyson series.

use serde::Serialize;

use crate::error::{Error, Result};

/// 4ⁿ (n₀+1)⋯(n₀+n) ‖V‖ⁿ ‖R₀‖.
pub fn commutator_term(n0: usize, n: usize, vnorm: f64, r0_norm: f64) -> f64 {
    let mut v = r0_norm;
    for k in 1..=n {
        v *= 4.0 * (n0 + k) as f64 * vnorm;
    }
    v
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailBound {
    /// Σ_{n>N} (|t|ⁿ/n!) 4ⁿ (n₀+1)⋯(n₀+n) ‖V‖ⁿ ‖R₀‖, or +∞ when divergent.
    pub value: f64,
    /// Geometric majorant used for the part not summed term by term.
    pub remainder: f64,
    /// 4|t|‖V‖ ≥ 1.
    pub divergent: bool,
}

/// Tail of the commutator-bound series from N+1 on.
pub fn commutator_tail(
    n0: usize,
    order: usize,
    vnorm: f64,
    t: f64,
    r0_norm: f64,
) -> Result<TailBound> {
    if !(vnorm >= 0.0 && r0_norm >= 0.0 && t.is_finite() && vnorm.is_finite()) {
        return Err(Error::InvalidArgument(
            "norms must be finite and nonnegative".into(),
        ));
    }
    let rho = 4.0 * t.abs() * vnorm;
    if rho >= 1.0 {
        return Ok(TailBound {
            value: f64::INFINITY,
            remainder: f64::INFINITY,
            divergent: true,
        });
    }
    if rho == 0.0 || r0_norm == 0.0 {
        return Ok(TailBound {
            value: 0.0,
            remainder: 0.0,
            divergent: false,
        });
    }
    // a_n = ρⁿ (n₀+1)⋯(n₀+n)/n! · ‖R₀‖, with a_{n+1}/a_n = ρ (n₀+n+1)/(n+1) decreasing to ρ.
    let ratio = |n: usize| rho * (n0 + n + 1) as f64 / (n + 1) as f64;
    let mut a = r0_norm;
    for n in 0..=order {
        if n > 0 {
            a *= ratio(n - 1);
        }
    }
    // a is now a_N.
    let mut n = order;
    let mut sum = 0.0;
    loop {
        a *= ratio(n);
        n += 1;
        sum += a;
        let r = ratio(n);
        if r < 1.0 && a * r / (1.0 - r) <= 1e-16 * sum {
            let remainder = a * r / (1.0 - r);
            return Ok(TailBound {
                value: sum + remainder,
                remainder,
                divergent: false,
            });
        }
        if n > order + 1_000_000 {
            return Err(Error::Divergent("commutator tail did not settle".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential() {
        assert_eq!(commutator_term(3, 4, 0.0, 1.0), 0.0);
        assert_eq!(commutator_tail(3, 4, 0.0, 1.0, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn closed_form_for_unit_case() {
        // n₀ = 1, ‖V‖ = 1, t = 0.1: summands 0.4ⁿ(n+1).
        let direct = |n_min: usize| {
            (n_min..400)
                .map(|n| 0.4f64.powi(n as i32) * (n + 1) as f64)
                .sum::<f64>()
        };
        for order in [0, 5, 12, 30] {
            let tb = commutator_tail(1, order, 1.0, 0.1, 1.0).unwrap();
            assert!(!tb.divergent);
            assert!(
                (tb.value - direct(order + 1)).abs() <= 1e-14 * direct(order + 1),
                "{order}"
            );
        }
        let mut prev = f64::INFINITY;
        for order in 0..20 {
            let v = commutator_tail(1, order, 1.0, 0.1, 1.0).unwrap().value;
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn term_matches_product() {
        assert_eq!(
            commutator_term(2, 3, 0.5, 2.0),
            4f64.powi(3) * 3.0 * 4.0 * 5.0 * 0.125 * 2.0
        );
    }

    #[test]
    fn outside_radius_flagged() {
        let tb = commutator_tail(1, 12, 1.0, 0.5, 1.0).unwrap();
        assert!(tb.divergent && tb.value.is_infinite());
        assert!(commutator_tail(1, 12, 2.0, 0.125, 1.0).unwrap().divergent);
    }
}
