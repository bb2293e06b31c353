use super::*;
use crate::linalg::{compress, hermiticity_defect, op_norm, RealEig};
use crate::resolvsym::{cq_int, Poly};

fn unit(dim: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[k] = 1.0;
    v
}

#[test]
fn four_level_commutator_defect_only_at_edge() {
    let rep = TruncatedRep::standard(1, 4);
    let (q, p) = (rep.q_matrix(0), rep.p_matrix(0));
    let comm = &q * &p - &p * &q;
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j && i < 3 {
                c(0.0, 1.0)
            } else {
                c(0.0, 0.0)
            };
            if (i, j) == (3, 3) {
                assert!((comm[(i, j)] - c(0.0, -3.0)).norm() < 1e-12);
            } else {
                assert!((comm[(i, j)] - want).norm() < 1e-12, "({i},{j})");
            }
        }
    }
}

#[test]
fn number_operator_spectrum_on_compression() {
    let rep = TruncatedRep::standard(1, 10);
    let (q, p) = (rep.q_matrix(0), rep.p_matrix(0));
    let h = &q * &q + &p * &p;
    let idx: Vec<usize> = (0..9).collect();
    let low = compress(&h, &idx);
    for (k, i) in idx.iter().enumerate() {
        assert!((low[(k, k)] - c(2.0 * *i as f64 + 1.0, 0.0)).norm() < 1e-12);
    }
    assert!(hermiticity_defect(&low) < 1e-12);
}

#[test]
fn modes_commute_exactly() {
    let rep = TruncatedRep::standard(2, 3);
    assert_eq!(rep.dim(), 9);
    let q1 = rep.q_matrix(0);
    for other in [rep.q_matrix(1), rep.p_matrix(1)] {
        let comm = &q1 * &other - &other * &q1;
        assert_eq!(op_norm(&comm), 0.0);
    }
}

#[test]
fn basis_fields_match_named_operators() {
    let rep = TruncatedRep::standard(1, 6);
    let b = rep.basis().clone();
    let phi_p = rep.field_matrix(&b.p[0]).unwrap();
    let phi_q = rep.field_matrix(&b.q[0]).unwrap();
    assert!(op_norm(&(phi_p - rep.q_matrix(0))) < 1e-14);
    assert!(op_norm(&(phi_q - rep.p_matrix(0))) < 1e-14);
}

#[test]
fn field_is_linear_and_hermitian() {
    let rep = TruncatedRep::standard(2, 5);
    let f = [0.3, -1.2, 0.7, 2.0];
    let f2: Vec<f64> = f.iter().map(|x| 2.0 * x).collect();
    let a = rep.field_matrix(&f).unwrap();
    let b = rep.field_matrix(&f2).unwrap();
    assert_eq!(b, &a * c(2.0, 0.0));
    assert!(hermiticity_defect(&a) < 1e-14);
    assert_eq!(op_norm(&rep.field_matrix(&[0.0; 4]).unwrap()), 0.0);
}

#[test]
fn resolvent_of_zero_field_is_scalar() {
    let rep = TruncatedRep::standard(1, 8);
    let z = c(2.0, 0.5);
    let r = rep.resolvent_matrix(z, &[0.0, 0.0]).unwrap();
    let want = CMat::identity(8, 8) * (c(0.0, -1.0) / z);
    assert!(op_norm(&(r - want)) < 1e-14);
}

#[test]
fn resolvent_norm_at_odd_cutoff() {
    let rep = TruncatedRep::standard(1, 129);
    let f = rep.basis().q[0].clone();
    let r = rep.resolvent_matrix(c(2.0, 0.0), &f).unwrap();
    assert!((op_norm(&r) - 0.5).abs() < 1e-10);
    let phi = rep.field_matrix(&f).unwrap();
    let resid = (CMat::identity(129, 129) * c(0.0, 2.0) - phi) * &r - CMat::identity(129, 129);
    assert!(op_norm(&resid) < 1e-12);
}

#[test]
fn resolvent_adjoint_consistency() {
    let rep = TruncatedRep::standard(2, 6);
    let f = [0.5, 1.0, -0.25, 0.75];
    let a = rep.resolvent_matrix(c(1.5, 0.0), &f).unwrap();
    let b = rep.resolvent_matrix(c(-1.5, 0.0), &f).unwrap();
    assert!(op_norm(&(a.adjoint() - b)) < 1e-12);
}

#[test]
fn spectral_application_matches_dense_solve() {
    let rep = TruncatedRep::standard(2, 7);
    let f = [0.4, -0.9, 1.3, 0.2];
    let z = c(-0.8, 0.3);
    let dense = rep.resolvent_matrix(z, &f).unwrap();
    let mut block = CMat::identity(rep.dim(), rep.dim());
    rep.apply_resolvent(z, &f, &mut block).unwrap();
    assert!(op_norm(&(dense - block)) < 1e-11);
}

#[test]
fn resolvent_equation_residual() {
    let rep = TruncatedRep::standard(1, 40);
    let f = [1.0, 0.5];
    let (l, m) = (1.0, -2.5);
    let rl = rep.resolvent_matrix(c(l, 0.0), &f).unwrap();
    let rm = rep.resolvent_matrix(c(m, 0.0), &f).unwrap();
    let lhs = &rl - &rm;
    let rhs = &rl * &rm * c(0.0, m - l);
    assert!(op_norm(&(lhs - rhs)) < 1e-10);
}

#[test]
fn weyl_is_unitary_and_trivial_at_zero() {
    let rep = TruncatedRep::standard(2, 6);
    let w = rep.weyl_matrix(&[0.3, 0.1, -0.7, 0.4]).unwrap();
    let id = CMat::identity(36, 36);
    assert!(op_norm(&(&w * w.adjoint() - &id)) < 1e-10);
    assert!(op_norm(&(rep.weyl_matrix(&[0.0; 4]).unwrap() - id)) < 1e-14);
}

#[test]
fn weyl_matches_matrix_exponential() {
    let rep = TruncatedRep::standard(1, 12);
    let f = [0.6, -0.4];
    let phi = rep.field_matrix(&f).unwrap();
    let e = (phi * c(0.0, 1.0)).exp();
    assert!(op_norm(&(e - rep.weyl_matrix(&f).unwrap())) < 1e-10);
}

#[test]
fn compressed_weyl_relation() {
    let rep = TruncatedRep::standard(1, 128);
    let (f, h) = ([0.5, 0.2], [-0.3, 0.6]);
    let sum = [f[0] + h[0], f[1] + h[1]];
    let sigma = rep.space().sigma(&f, &h).unwrap();
    let lhs = rep.weyl_matrix(&f).unwrap() * rep.weyl_matrix(&h).unwrap();
    let rhs = rep.weyl_matrix(&sum).unwrap() * Complex64::from_polar(1.0, -sigma / 2.0);
    let idx = rep.low_levels(32);
    assert!(op_norm(&compress(&(lhs - rhs), &idx)) < 1e-6);
}

#[test]
fn compressed_adjoint_action() {
    let rep = TruncatedRep::standard(1, 128);
    let (f, h) = ([0.4, -0.3], [1.0, 0.5]);
    let lambda = 1.5;
    let w = rep.weyl_matrix(&f).unwrap();
    let lhs = &w * rep.resolvent_matrix(c(lambda, 0.0), &h).unwrap() * w.adjoint();
    let s = rep.space().sigma(&h, &f).unwrap();
    let rhs = rep.resolvent_matrix(c(lambda, s), &h).unwrap();
    let idx = rep.low_levels(32);
    assert!(op_norm(&compress(&(lhs - rhs), &idx)) < 1e-6);
}

#[test]
fn laplace_matches_solve_both_signs() {
    let rep = TruncatedRep::standard(1, 64);
    let f = rep.basis().q[0].clone();
    let idx = rep.low_levels(16);
    for lambda in [1.0, -1.0, 2.0] {
        let cfg = LaplaceConfig {
            columns: Some(idx.clone()),
            ..Default::default()
        };
        let lap = rep.laplace_resolvent(lambda, &f, &cfg).unwrap();
        let direct = rep.resolvent_matrix(c(lambda, 0.0), &f).unwrap();
        let want = CMat::from_fn(idx.len(), idx.len(), |i, j| direct[(idx[i], idx[j])]);
        let got = CMat::from_fn(idx.len(), idx.len(), |i, j| lap.matrix[(idx[i], j)]);
        assert!(op_norm(&(got - want)) < 1e-8, "lambda {lambda}");
    }
}

#[test]
fn laplace_of_zero_field() {
    let rep = TruncatedRep::standard(1, 8);
    let lap = rep
        .laplace_resolvent(2.0, &[0.0, 0.0], &LaplaceConfig::default())
        .unwrap();
    let want = CMat::identity(8, 8) * c(0.0, -0.5);
    assert!(op_norm(&(lap.matrix - want)) < 1e-9);
}

#[test]
fn laplace_integrand_is_weyl() {
    // The eigenbasis integrand equals W(−tf) entrywise.
    let rep = TruncatedRep::standard(1, 10);
    let f = [0.7, 0.2];
    let (u, vals) = rep.dense_spectrum(&f).unwrap();
    for t in [0.1, 0.9, 2.5] {
        let d = CMat::from_diagonal(&CVec::from_iterator(
            vals.len(),
            vals.iter().map(|v| Complex64::from_polar(1.0, -t * v)),
        ));
        let w = rep.weyl_matrix(&[-t * f[0], -t * f[1]]).unwrap();
        assert!(op_norm(&(&u * d * u.adjoint() - w)) < 1e-11);
    }
}

#[test]
fn regular_limit_on_eigenvectors() {
    let rep = TruncatedRep::standard(1, 16);
    let f = rep.basis().p[0].clone();
    let eig = RealEig::new(&single_q(16));
    let k = 11;
    let v = eig.values[k];
    let psi = CVec::from_iterator(16, (0..16).map(|i| c(eig.vectors[(i, k)], 0.0)));
    let lambda = 3.0;
    let d = rep.regular_limit_defect(lambda, &f, &psi).unwrap();
    assert!((d - v.abs() / (lambda * lambda + v * v).sqrt()).abs() < 1e-12);
}

#[test]
fn regular_limit_vacuum_monotone() {
    let rep = TruncatedRep::standard(1, 64);
    let f = rep.basis().q[0].clone();
    let psi = rep.vacuum();
    let ds: Vec<f64> = [1e1, 1e2, 1e3, 1e4]
        .iter()
        .map(|&l| rep.regular_limit_defect(l, &f, &psi).unwrap())
        .collect();
    assert!(ds.windows(2).all(|w| w[1] <= w[0]));
    assert!(ds[3] < 1e-3);
}

#[test]
fn hs_norm_settles_and_identity_diverges() {
    let norms: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let rep = TruncatedRep::standard(1, n);
            let b = rep.basis().clone();
            rep.compact_product_hs(&[(1.0, b.p[0].clone()), (1.0, b.q[0].clone())])
                .unwrap()
        })
        .collect();
    assert!(norms.iter().all(|x| x.is_finite()));
    let (d1, d2) = ((norms[1] - norms[0]).abs(), (norms[2] - norms[1]).abs());
    assert!(d2 < d1, "{norms:?}");
    let small = frobenius(&CMat::identity(64, 64));
    let big = frobenius(&CMat::identity(256, 256));
    assert!(big > 1.9 * small);
}

#[test]
fn hs_factorized_matches_dense() {
    let rep = TruncatedRep::standard(2, 8);
    let b = rep.basis().clone();
    let factors = vec![
        (1.0, b.p[0].clone()),
        (1.0, b.q[0].clone()),
        (2.0, b.p[1].clone()),
        (-1.0, b.q[1].clone()),
    ];
    let fast = rep.compact_product_hs(&factors).unwrap();
    let mut prod = CMat::identity(64, 64);
    for (l, f) in &factors {
        prod *= rep.resolvent_matrix(c(*l, 0.0), f).unwrap();
    }
    assert!((fast - frobenius(&prod)).abs() < 1e-10 * fast);
}

#[test]
fn state_evaluation_examples() {
    let rep = TruncatedRep::standard(1, 32);
    let psi = rep.vacuum();
    assert!((rep.evaluate_state(&psi, &Poly::one()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    let r0 = Poly::resolvent(cq_int(2, 0), vec![cq_int(0, 0).re, cq_int(0, 0).re]).unwrap();
    assert!((rep.evaluate_state(&psi, &r0).unwrap() - c(0.0, -0.5)).norm() < 1e-15);
    let a = Poly::resolvent_f64(1.0, &[0.3, 1.0]).unwrap();
    let p = a
        .sub(&a.adjoint())
        .add(&a.mul(&a.adjoint()).scale(&cq_int(0, 2)));
    assert!(rep.evaluate_state(&psi, &p).unwrap().norm() < 1e-10);
}

#[test]
fn vacuum_is_annihilated() {
    for (modes, n) in [(1, 8), (2, 5)] {
        let rep = TruncatedRep::standard(modes, n);
        assert!(rep.vacuum_annihilation_defect().unwrap() < 1e-15);
    }
}

#[test]
fn dense_limit_is_enforced() {
    let rep = TruncatedRep::standard(3, 17);
    assert!(matches!(
        rep.field_matrix(&unit(6, 0)),
        Err(Error::Budget(_))
    ));
}
