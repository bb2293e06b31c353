use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::c;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Samples {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TryFrom<Samples> for Spline {
    type Error = Error;
    fn try_from(s: Samples) -> Result<Self> {
        Spline::new(s.xs, s.ys)
    }
}

impl From<Spline> for Samples {
    fn from(s: Spline) -> Self {
        Samples { xs: s.xs, ys: s.ys }
    }
}

/// Natural cubic spline through (xs, ys); zero outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Samples", into = "Samples")]
pub struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(Error::InvalidArgument(
                "spline needs at least 3 matching samples".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) || xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "spline grid must be finite and strictly increasing".into(),
            ));
        }
        // Tridiagonal solve for second derivatives with m_0 = m_{n−1} = 0.
        let mut m = vec![0.0; n];
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let d = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
            let denom = b - a * cp[i - 1];
            cp[i] = cc / denom;
            dp[i] = (d - a * dp[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = dp[i] - cp[i] * m[i + 1];
        }
        Ok(Spline { xs, ys, m })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let k = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        a * self.ys[k]
            + b * self.ys[k + 1]
            + ((a * a * a - a) * self.m[k] + (b * b * b - b) * self.m[k + 1]) * h * h / 6.0
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }
}

/// Real potentials V with optional closed-form Fourier transforms
/// Ṽ(w) = (2π)^{−1/2} ∫ V(x) e^{−iwx} dx.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    /// Ṽ(w) = i·a·w·e^{−w²}, V(x) = −a x e^{−x²/4} / (2√2).
    OddGaussian {
        a: f64,
    },
    /// V(x) = a(1 − x²/s²) e^{−x²/(2s²)}; zero mean.
    MexicanHat {
        a: f64,
        s: f64,
    },
    /// V(x) = a e^{−x²/(2s²)}; nonzero mean.
    Gaussian {
        a: f64,
        s: f64,
    },
    /// V(x) = a·e·exp(−1/(1 − x²/r²)) on |x| < r, zero elsewhere.
    Bump {
        a: f64,
        r: f64,
    },
    Sampled {
        spline: Spline,
    },
}

impl Potential {
    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        Ok(Potential::Sampled {
            spline: Spline::new(xs, ys)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Potential::OddGaussian { a } => a.is_finite(),
            Potential::MexicanHat { a, s } | Potential::Gaussian { a, s } => {
                a.is_finite() && s.is_finite() && *s > 0.0
            }
            Potential::Bump { a, r } => a.is_finite() && r.is_finite() && *r > 0.0,
            Potential::Sampled { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid potential parameters {self:?}"
            )))
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::OddGaussian { a } => -a * x * (-x * x / 4.0).exp() / (2.0 * 2f64.sqrt()),
            Potential::MexicanHat { a, s } => {
                let u = x * x / (s * s);
                a * (1.0 - u) * (-u / 2.0).exp()
            }
            Potential::Gaussian { a, s } => a * (-x * x / (2.0 * s * s)).exp(),
            Potential::Bump { a, r } => {
                let u = x / r;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    a * E * (-1.0 / (1.0 - u * u)).exp()
                }
            }
            Potential::Sampled { spline } => spline.eval(x),
        }
    }

    /// Closed-form Ṽ(w), if available.
    pub fn fourier(&self, w: f64) -> Option<Complex64> {
        match self {
            Potential::OddGaussian { a } => Some(c(0.0, a * w * (-w * w).exp())),
            Potential::MexicanHat { a, s } => {
                let sw = s * w;
                Some(c(a * s * sw * sw * (-sw * sw / 2.0).exp(), 0.0))
            }
            Potential::Gaussian { a, s } => Some(c(a * s * (-(s * w) * (s * w) / 2.0).exp(), 0.0)),
            _ => None,
        }
    }

    /// sup |V|.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Potential::OddGaussian { a } => a.abs() * (-0.5f64).exp() / 2.0,
            Potential::MexicanHat { a, .. }
            | Potential::Gaussian { a, .. }
            | Potential::Bump { a, .. } => a.abs(),
            Potential::Sampled { spline } => {
                let (lo, hi) = spline.range();
                let n = 20_000;
                (0..=n)
                    .map(|k| spline.eval(lo + (hi - lo) * k as f64 / n as f64).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Half-width of the support when V is compactly supported.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Potential::Bump { r, .. } => Some(*r),
            Potential::Sampled { spline } => {
                let (lo, hi) = spline.range();
                Some(lo.abs().max(hi.abs()))
            }
            _ => None,
        }
    }

    /// The same shape multiplied by s.
    pub fn scaled(&self, s: f64) -> Potential {
        match self {
            Potential::OddGaussian { a } => Potential::OddGaussian { a: a * s },
            Potential::MexicanHat { a, s: w } => Potential::MexicanHat { a: a * s, s: *w },
            Potential::Gaussian { a, s: w } => Potential::Gaussian { a: a * s, s: *w },
            Potential::Bump { a, r } => Potential::Bump { a: a * s, r: *r },
            Potential::Sampled { spline } => Potential::Sampled {
                spline: Spline::new(spline.xs.clone(), spline.ys.iter().map(|y| y * s).collect())
                    .expect("scaling keeps a valid grid"),
            },
        }
    }

    /// Closed-form Ṽ with Ṽ(0) = 0, as required for the cocycle kernel.
    pub fn require_mean_zero(&self) -> Result<()> {
        match self.fourier(0.0) {
            None => Err(Error::InvalidArgument(
                "potential has no closed-form Fourier transform".into(),
            )),
            Some(v) if v.norm() > 1e-12 => Err(Error::Divergent(format!(
                "Ṽ(0) = {:.3e} ≠ 0: the kernel norm diverges at w = 0",
                v.norm()
            ))),
            Some(_) => Ok(()),
        }
    }
}

/// (2π)^{−1/2}, the Fourier normalization.
pub fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;

    fn numeric_fourier(p: &Potential, w: f64, half: f64) -> Complex64 {
        let re = adaptive(
            |x| p.value(x) * (w * x).cos(),
            -half,
            half,
            1e-13,
            1e-12,
            2000,
        )
        .value;
        let im = adaptive(
            |x| -p.value(x) * (w * x).sin(),
            -half,
            half,
            1e-13,
            1e-12,
            2000,
        )
        .value;
        c(re, im) * inv_sqrt_2pi()
    }

    #[test]
    fn closed_form_transforms_match_quadrature() {
        let ps = [
            Potential::OddGaussian { a: 1.3 },
            Potential::MexicanHat { a: 0.7, s: 1.4 },
            Potential::Gaussian { a: -0.5, s: 0.8 },
        ];
        for p in &ps {
            for w in [0.0, 0.4, 1.1, 2.5] {
                let d = numeric_fourier(p, w, 40.0) - p.fourier(w).unwrap();
                assert!(d.norm() < 1e-10, "{p:?} at {w}: {d}");
            }
        }
    }

    #[test]
    fn sup_norms() {
        let grid = |p: &Potential| {
            (0..=80_000)
                .map(|k| p.value(-20.0 + k as f64 * 5e-4).abs())
                .fold(0.0, f64::max)
        };
        for p in [
            Potential::OddGaussian { a: 2.0 },
            Potential::MexicanHat { a: -1.5, s: 0.9 },
            Potential::Bump { a: -0.3, r: 1.0 },
        ] {
            assert!((grid(&p) - p.sup_norm()).abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn mean_zero_classes() {
        assert!(Potential::OddGaussian { a: 1.0 }
            .require_mean_zero()
            .is_ok());
        assert!(Potential::MexicanHat { a: 1.0, s: 2.0 }
            .require_mean_zero()
            .is_ok());
        assert!(matches!(
            Potential::Gaussian { a: 1.0, s: 1.0 }.require_mean_zero(),
            Err(Error::Divergent(_))
        ));
        assert!(Potential::Bump { a: 1.0, r: 1.0 }
            .require_mean_zero()
            .is_err());
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let xs: Vec<f64> = (0..=40).map(|k| -2.0 + 0.1 * k as f64).collect();
        let f = |x: f64| (x * 1.3).sin();
        let sp = Spline::new(xs.clone(), xs.iter().map(|&x| f(x)).collect()).unwrap();
        for x in [-1.23, 0.0, 0.77, 1.5] {
            assert!((sp.eval(x) - f(x)).abs() < 1e-4);
        }
        assert_eq!(sp.eval(3.0), 0.0);
        assert!(Spline::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn scaling_is_linear() {
        let p = Potential::Bump { a: 0.4, r: 2.0 };
        let q = p.scaled(-2.5);
        assert!((q.value(0.3) + 2.5 * p.value(0.3)).abs() < 1e-15);
        assert!((q.sup_norm() - 2.5 * p.sup_norm()).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let p: Potential = serde_json::from_str(r#"{"kind":"bump","a":-0.5,"r":1.5}"#).unwrap();
        assert_eq!(p, Potential::Bump { a: -0.5, r: 1.5 });
        assert!(serde_json::from_str::<Potential>(r#"{"kind":"bump","a":1,"r":1,"x":2}"#).is_err());
        let s: Potential =
            serde_json::from_str(r#"{"kind":"sampled","spline":{"xs":[-1,0,1],"ys":[0,1,0]}}"#)
                .unwrap();
        assert_eq!(s.value(0.0), 1.0);
        let back: Potential = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
