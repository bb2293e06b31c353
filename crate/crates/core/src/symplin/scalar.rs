use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Field of coordinates: exact rationals or floats.
///
/// Rank and nullspace decisions are delegated to the scalar type so that the
/// rational path is exact and the float path uses an SVD with a relative cutoff.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn to_f64(&self) -> f64;
    fn from_f64(x: f64) -> Self;
    fn from_i64(x: i64) -> Self;
    /// True when `self` is zero at the given scale (exactly zero for rationals).
    fn negligible(&self, scale: f64, tol: f64) -> bool;
    /// Basis of {x : rows · x = 0}.
    fn nullspace(rows: &[Vec<Self>], ncols: usize, tol: f64) -> Vec<Vec<Self>>;
    fn rank(rows: &[Vec<Self>], ncols: usize, tol: f64) -> usize;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }

    fn negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }

    fn nullspace(rows: &[Vec<Self>], ncols: usize, _tol: f64) -> Vec<Vec<Self>> {
        let (m, pivots) = rref(rows, ncols);
        let mut out = Vec::new();
        for fc in 0..ncols {
            if pivots.contains(&fc) {
                continue;
            }
            let mut v = vec![BigRational::zero(); ncols];
            v[fc] = BigRational::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[k][fc].clone();
            }
            out.push(v);
        }
        out
    }

    fn rank(rows: &[Vec<Self>], ncols: usize, _tol: f64) -> usize {
        rref(rows, ncols).1.len()
    }
}

fn rref(rows: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, i);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (m, pivots)
}

fn svd_parts(rows: &[Vec<f64>], ncols: usize) -> (Vec<f64>, DMatrix<f64>) {
    let nrows = rows.len().max(ncols);
    let a = DMatrix::from_fn(
        nrows,
        ncols,
        |i, j| if i < rows.len() { rows[i][j] } else { 0.0 },
    );
    let svd = a.svd(false, true);
    (
        svd.singular_values.iter().copied().collect(),
        svd.v_t.expect("v_t requested"),
    )
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }

    fn negligible(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale.max(f64::MIN_POSITIVE)
    }

    fn nullspace(rows: &[Vec<Self>], ncols: usize, tol: f64) -> Vec<Vec<Self>> {
        if ncols == 0 {
            return Vec::new();
        }
        let (sv, vt) = svd_parts(rows, ncols);
        let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
        (0..ncols)
            .filter(|&k| sv[k] <= tol * smax || smax == 0.0)
            .map(|k| vt.row(k).iter().copied().collect())
            .collect()
    }

    fn rank(rows: &[Vec<Self>], ncols: usize, tol: f64) -> usize {
        if ncols == 0 || rows.is_empty() {
            return 0;
        }
        let (sv, _) = svd_parts(rows, ncols);
        let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
        if smax == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * smax).count()
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_nullspace_of_rank_one() {
        let rows = vec![vec![rat(1, 1), rat(2, 1), rat(3, 1)]];
        let ns = BigRational::nullspace(&rows, 3, 0.0);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = &v[0] + &(rat(2, 1) * &v[1]) + rat(3, 1) * &v[2];
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn float_rank_respects_relative_tolerance() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1e-12]];
        assert_eq!(f64::rank(&rows, 2, 1e-10), 1);
        assert_eq!(f64::rank(&rows, 2, 1e-14), 2);
        assert_eq!(f64::nullspace(&rows, 2, 1e-10).len(), 1);
    }
}
