//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

pub fn op_norm_real(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    op_norm(&(m - m.adjoint()))
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and unitary eigenvectors.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEig {
    pub fn new(m: &CMat) -> Self {
        let e = SymmetricEigen::new(m.clone());
        let (values, vectors) = jacobi_refine(m, e.eigenvectors);
        HermEig { values, vectors }
    }

    /// U f(D) U†.
    pub fn apply_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct RealEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl RealEig {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let e = SymmetricEigen::new(m.clone());
        let (vals, vecs) = jacobi_refine(&to_complex(m), to_complex(&e.eigenvectors));
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let values = idx.iter().map(|&i| vals[i]).collect();
        let vectors = DMatrix::from_fn(m.nrows(), idx.len(), |r, c| vecs[(r, idx[c])].re);
        RealEig { values, vectors }
    }

    pub fn apply_fn<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.transpose()
    }
}

/// Above this dimension the eigenvectors from nalgebra are used unrefined.
const REFINE_LIMIT: usize = 512;

/// Polishes approximate eigenvectors `v` of the Hermitian `a` by cyclic Jacobi
/// sweeps on V†AV. nalgebra's QR iteration can leave residuals near 1e-10·‖A‖;
/// on the nearly diagonal V†AV one or two sweeps bring them to roundoff.
/// Real input stays real: rotations use the exact phase a_pq/|a_pq|.
fn jacobi_refine(a: &CMat, mut v: CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    let mut b = v.adjoint() * a * &v;
    if n <= REFINE_LIMIT {
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for _ in 0..12 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    off = off.max(b[(p, q)].norm());
                }
            }
            if off <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let r = b[(p, q)].norm();
                    if r <= 1e-18 * scale {
                        continue;
                    }
                    let phase = b[(p, q)] / r;
                    let zeta = (b[(q, q)].re - b[(p, p)].re) / (2.0 * r);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = t * cs;
                    // J = [[c, s], [−s·conj(e), c·conj(e)]] on columns p, q.
                    let (jpp, jpq) = (c(cs, 0.0), c(sn, 0.0));
                    let (jqp, jqq) = (-phase.conj() * sn, phase.conj() * cs);
                    for i in 0..n {
                        let (bp, bq) = (b[(i, p)], b[(i, q)]);
                        b[(i, p)] = bp * jpp + bq * jqp;
                        b[(i, q)] = bp * jpq + bq * jqq;
                        let (vp, vq) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = vp * jpp + vq * jqp;
                        v[(i, q)] = vp * jpq + vq * jqq;
                    }
                    for j in 0..n {
                        let (bp, bq) = (b[(p, j)], b[(q, j)]);
                        b[(p, j)] = jpp.conj() * bp + jqp.conj() * bq;
                        b[(q, j)] = jpq.conj() * bp + jqq.conj() * bq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| b[(i, i)].re).collect(), v)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn kron_real(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Restriction of `m` to the given row and column index sets.
pub fn compress(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigendecompositions_reconstruct_to_roundoff() {
        let n = 10;
        let h = CMat::from_fn(n, n, |i, j| {
            let base = if i == j { 2.0 * i as f64 + 1.0 } else { 0.0 };
            c(
                base - 0.3 * (-((i as f64 - j as f64).powi(2)) / 7.0).exp(),
                0.1 * (i as f64 - j as f64) / (1.0 + (i + j) as f64),
            )
        });
        let e = HermEig::new(&h);
        assert!(op_norm(&(e.apply_fn(|x| c(x, 0.0)) - &h)) < 1e-13);
        let r = h.map(|z| z.re);
        let e = RealEig::new(&r);
        assert!((e.apply_fn(|x| x) - &r).amax() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, -3.0),
            c(2.0, 0.0),
        ]));
        assert!((op_norm(&m) - 3.0).abs() < 1e-14);
        assert!((frobenius(&m) - 14f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn herm_eig_reconstructs() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let e = HermEig::new(&m);
        let back = e.apply_fn(|x| c(x, 0.0));
        assert!(op_norm(&(back - &m)) < 1e-14);
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let a = CMat::from_row_slice(1, 2, &[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = CMat::from_row_slice(2, 1, &[c(3.0, 0.0), c(4.0, 0.0)]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (2, 2));
        assert_eq!(k[(1, 1)], c(8.0, 0.0));
    }
}
