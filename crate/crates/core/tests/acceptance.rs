//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::Instant;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use resalg::cli::suites::{
    laplace_defect, potential_operator, quasifree_pair, random_direction, random_subspace,
    weyl_defects,
};
use resalg::dynamics::{
    bound_violations, cocycle_hs_norm_sq, cocycle_hs_norm_sq_2d, commutator_tail, continuity_bound,
    dyson_cocycle, hermite_matrix_elements, oscillator_hamiltonian, weight_constant,
    weighted_norm_sq, weighted_norm_sq_quadrature, DysonConfig, HermiteConfig, LatticeModel,
    Potential, SiteInterval,
};
use resalg::fockrep::TruncatedRep;
use resalg::linalg::{c, frobenius, op_norm, CMat};
use resalg::resolvsym::{
    cq, relation_instances, simplify, von_neumann_expand, Poly, SimplifyOptions, Q,
};
use resalg::states::{dirac_derivative_check, dirac_poly_value, DiracConstraintSet, DiracValue};
use resalg::symplin::{
    canonical_gram_defect, radical, random_exact_space, rat, regularity_decomposition,
    symplectic_basis, verify_decomposition, ExactSpace, Scalar, Subspace,
};

type Outcome = Result<(bool, String), String>;

struct Run {
    failed: Vec<usize>,
}

impl Run {
    fn criterion(&mut self, n: usize, title: &str, budget_s: f64, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match out {
            Ok((ok, d)) => (ok && secs < budget_s, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {verdict}  {title}: {detail} [{secs:.2} s, limit {budget_s} s]");
        if !ok {
            self.failed.push(n);
        }
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn q1() -> (Vec<f64>, Vec<f64>) {
    let b = TruncatedRep::standard(1, 2).basis().clone();
    (b.q[0].clone(), b.p[0].clone())
}

fn main() {
    let mut run = Run { failed: Vec::new() };

    run.criterion(
        1,
        "relations reduce to zero, 200 instances on a 4-dim space",
        30.0,
        || {
            let space = ExactSpace::standard(2);
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let opts = SimplifyOptions {
                budget: 400,
                degree_cap: 12,
                trace: false,
            };
            let mut bad = 0;
            for _ in 0..200 {
                for inst in relation_instances(&space, &mut rng).map_err(e)? {
                    if !simplify(&inst.difference(), &space, &opts)
                        .map_err(e)?
                        .poly
                        .is_zero()
                    {
                        bad += 1;
                    }
                }
            }
            Ok((
                bad == 0,
                format!("{bad} of 1400 relation instances left nonzero"),
            ))
        },
    );

    run.criterion(2, "norm law at N=129", 10.0, || {
        let rep = TruncatedRep::standard(1, 129);
        let (q, p) = q1();
        let qp: Vec<f64> = q.iter().zip(&p).map(|(a, b)| a + b).collect();
        let mut worst = 0.0f64;
        for lam in [0.5, 1.0, 2.0, 5.0] {
            for f in [&q, &p, &qp] {
                let n = op_norm(&rep.resolvent_matrix(c(lam, 0.0), f).map_err(e)?);
                worst = worst.max((n - 1.0 / lam).abs());
            }
        }
        Ok((
            worst < 1e-10,
            format!("max |‖R‖ − 1/|λ|| = {worst:.3e} (tol 1e-10)"),
        ))
    });

    run.criterion(3, "von Neumann series (1, 1.5), K=30", 5.0, || {
        let rep = TruncatedRep::standard(1, 64);
        let (q, _) = q1();
        let fq: Vec<Q> = q.iter().map(|&x| <Q as Scalar>::from_f64(x)).collect();
        let (poly, tail) = von_neumann_expand(&rat(3, 2), &Q::one(), &fq, 30).map_err(e)?;
        let diff = op_norm(
            &(rep.poly_matrix(&poly).map_err(e)?
                - rep.resolvent_matrix(c(1.5, 0.0), &q).map_err(e)?),
        );
        Ok((
            diff < tail,
            format!("difference {diff:.3e} < tail bound {tail:.3e}"),
        ))
    });

    run.criterion(4, "Laplace bridge at N=128", 60.0, || {
        let (q, _) = q1();
        let mut worst = 0.0f64;
        for lam in [1.0, -1.0, 2.0, -2.0] {
            worst = worst.max(laplace_defect(128, lam, &q, 4, 1e-11).map_err(e)?.0);
        }
        Ok((
            worst < 1e-6,
            format!("max compressed defect {worst:.3e} (tol 1e-6)"),
        ))
    });

    run.criterion(5, "Weyl relation and adjoint action", 60.0, || {
        let (f, g) = ([0.5, 0.2], [-0.3, 0.6]);
        let (w64, a64) = weyl_defects(64, &f, &g, 1.5, 4).map_err(e)?;
        let (w128, a128) = weyl_defects(128, &f, &g, 1.5, 4).map_err(e)?;
        let settles = |a: f64, b: f64| b < 1e-6 && (b < a || b <= 1e-12);
        Ok((
            settles(w64, w128) && settles(a64, a128),
            format!("Weyl {w64:.2e} → {w128:.2e}, adjoint {a64:.2e} → {a128:.2e} (N=64 → 128, tol 1e-6, floor 1e-12)"),
        ))
    });

    run.criterion(6, "compact ideal: HS norm of R(1,p)R(1,q)", 30.0, || {
        let norm = |n: usize| {
            let rep = TruncatedRep::standard(1, n);
            let b = rep.basis().clone();
            rep.compact_product_hs(&[(1.0, b.p[0].clone()), (1.0, b.q[0].clone())])
        };
        let (a, b) = (norm(128).map_err(e)?, norm(256).map_err(e)?);
        let rel = ((b - a) / b).abs();
        let ratio = frobenius(&CMat::identity(256, 256)) / frobenius(&CMat::identity(128, 128));
        let control = (ratio - 2f64.sqrt()).abs() < 1e-12;
        Ok((
            rel < 0.01 && control,
            format!("‖·‖₂ {a:.6} → {b:.6}, relative change {:.3}% (tol 1%); identity ratio {ratio:.6} = √2", 100.0 * rel),
        ))
    });

    run.criterion(7, "quasifree values against the Fock vacuum", 120.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for (modes, cutoff) in [(1, 256), (2, 64)] {
            let rep = TruncatedRep::standard(modes, cutoff);
            for _ in 0..20 {
                let a = random_direction(&mut rng, 2 * modes);
                let b = random_direction(&mut rng, 2 * modes);
                for chain in [vec![a.clone()], vec![a.clone(), b.clone()]] {
                    let (qf, fock, _) = quasifree_pair(&rep, &chain, 1e-8).map_err(e)?;
                    worst = worst.max((qf - fock).norm());
                }
            }
        }
        Ok((
            worst < 1e-5,
            format!("max difference {worst:.3e} over 20 directions at 1 and 2 modes (tol 1e-5)"),
        ))
    });

    run.criterion(8, "Dirac states", 10.0, || {
        let space = ExactSpace::standard(2);
        let z = Q::zero;
        let o = Q::one;
        let basis = vec![vec![o(), z(), z(), z()], vec![z(), z(), o(), z()]];
        let cset =
            DiracConstraintSet::new(&space, Subspace::new(&space, basis.clone()).map_err(e)?)
                .map_err(e)?;
        let val = |p: &Poly| dirac_poly_value(&cset, p, &space).map_err(e);
        let r = |l: Q, f: Vec<Q>| Poly::resolvent(cq(l, z()), f).map_err(e);
        let mut ok = true;
        let sum: Vec<Q> = vec![o(), z(), o(), z()];
        for f in basis.iter().chain([&sum]) {
            ok &= val(&r(o(), f.clone())?)? == DiracValue::Value(cq(z(), -o()));
        }
        let lams = [rat(1, 1), rat(2, 1), rat(-1, 2)];
        let mut prod = Poly::one();
        let mut want = cq(o(), z());
        for (k, l) in lams.iter().enumerate() {
            prod = prod.mul(&r(l.clone(), basis[k % 2].clone())?);
            want *= cq(z(), -(o() / l.clone()));
        }
        ok &= val(&prod)? == DiracValue::Value(want);
        // σ(g, C) ≠ 0
        for g in [vec![z(), o(), z(), z()], vec![o(), o(), z(), rat(2, 1)]] {
            ok &= val(&r(rat(3, 2), g)?)? == DiracValue::Value(cq(z(), z()));
        }
        let rep = TruncatedRep::standard(1, 32);
        let g = rep.basis().p[0].clone();
        let defects: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&h| dirac_derivative_check(&rep, 1.0, &g, h))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        let ratios: Vec<f64> = defects.windows(2).map(|w| w[0] / w[1]).collect();
        let rich = ratios.iter().all(|r| (3.5..=4.5).contains(r));
        Ok((
            ok && rich,
            format!(
                "exact values {}; Richardson ratios {ratios:.3?} in [3.5, 4.5]",
                if ok { "match" } else { "differ" }
            ),
        ))
    });

    run.criterion(9, "cocycle HS norm", 30.0, || {
        let odd = Potential::OddGaussian { a: 1.0 };
        let t = 1.0;
        let v = cocycle_hs_norm_sq(&odd, t).map_err(e)?.value;
        let target = t / 2.0;
        let mut worst_rel = 0.0f64;
        for (p, t) in [(odd.clone(), 1.0), (Potential::MexicanHat { a: 1.0, s: 1.2 }, 0.8), (Potential::MexicanHat { a: 0.5, s: 0.7 }, -1.5)] {
            let a = cocycle_hs_norm_sq(&p, t).map_err(e)?.value;
            let b = cocycle_hs_norm_sq_2d(&p, t).map_err(e)?.value;
            worst_rel = worst_rel.max(((a - b) / a).abs());
        }
        Ok((
            (v - target).abs() < 1e-6 && worst_rel < 1e-3,
            format!("Ṽ = w·e^(−w²), t = 1: HS² = {v:.8} vs |t|/2 = {target} (tol 1e-6); 1-D/2-D relative {worst_rel:.2e} (tol 1e-3)"),
        ))
    });

    run.criterion(10, "Hermite weighted norms and bound table", 60.0, || {
        let worst = (0..=20).map(|n| (weighted_norm_sq(n) - weighted_norm_sq_quadrature(n, 40)).abs()).fold(0.0, f64::max);
        let n0 = (weighted_norm_sq(0) - std::f64::consts::FRAC_1_SQRT_2).abs();
        let mut violations = 0;
        for (p, t) in [(Potential::Bump { a: 1.0, r: 1.0 }, 0.9), (Potential::Bump { a: -0.7, r: 2.0 }, -2.5)] {
            let k = weight_constant(&p).map_err(e)?;
            let el = hermite_matrix_elements(&p, t, 32, &HermiteConfig::default()).map_err(e)?;
            violations += bound_violations(&el.matrix, t, k, el.quad_error).len();
        }
        Ok((
            worst < 1e-8 && n0 < 1e-15 && violations == 0,
            format!("max weighted-norm error {worst:.2e} (tol 1e-8), n=0 off by {n0:.1e}; {violations} bound violations over 2×32² entries"),
        ))
    });

    run.criterion(11, "lattice ground states, superadditivity and sandwich", 600.0, || {
        let free = LatticeModel::new(SiteInterval::new(0, 2).map_err(e)?, 12, None).map_err(e)?;
        let mut free_err = 0.0f64;
        for len in 1..=3 {
            let g = free.ground_state(&SiteInterval::new(0, len - 1).map_err(e)?).map_err(e)?;
            free_err = free_err.max((g.energy - len as f64).abs());
        }
        let model = LatticeModel::new(SiteInterval::new(0, 2).map_err(e)?, 12, Some(Potential::Bump { a: 0.5, r: 1.5 })).map_err(e)?;
        let mus = [0.5, 1.0, 2.0, 5.0];
        let (mut superadd, mut sandwich, mut monotone, mut checked) = (true, true, true, 0);
        for n in 2..=3 {
            for m in 1..n {
                let outer = SiteInterval::new(0, n as i64 - 1).map_err(e)?;
                let inner = outer.centered(m).map_err(e)?;
                superadd &= model.superadditivity(&outer, &inner).map_err(e)?.holds;
                let rs = model.sandwich(&outer, &inner, &mus).map_err(e)?;
                sandwich &= rs.iter().all(|r| r.holds(r.residual + 1e-12));
                let mv: Vec<f64> = rs.iter().map(|r| r.mu * r.value).collect();
                monotone &= mv.windows(2).all(|w| w[1] >= w[0]) && mv.iter().all(|x| *x <= 1.0 + 1e-12);
                checked += rs.len();
            }
        }
        Ok((
            free_err < 1e-6 && superadd && sandwich && monotone,
            format!(
                "V=0 max |E − |Λ|| = {free_err:.2e} (tol 1e-6); superadditivity {superadd}, sandwich {sandwich} on {checked} grid points, μ·value monotone {monotone}"
            ),
        ))
    });

    run.criterion(12, "Dyson continuity bound and commutator tail", 60.0, || {
        let rep = TruncatedRep::standard(1, 10);
        let h0 = oscillator_hamiltonian(&rep);
        let base = Potential::Bump { a: 1.0, r: 1.5 };
        let scales = [1.0, 0.5, -0.3];
        let cfg = DysonConfig::default();
        let mut cont = true;
        for w in scales.windows(2) {
            let (v1, v2) = (potential_operator(&base.scaled(w[0]), 10), potential_operator(&base.scaled(w[1]), 10));
            let (g1, g2) = (dyson_cocycle(&h0, &v1, 1.0, 24, &cfg).map_err(e)?, dyson_cocycle(&h0, &v2, 1.0, 24, &cfg).map_err(e)?);
            let lhs = op_norm(&(&g1.matrix - &g2.matrix));
            let bound = continuity_bound(op_norm(&(&v1 - &v2)), op_norm(&v1), op_norm(&v2), 1.0);
            cont &= lhs <= bound + g1.tail_bound + g2.tail_bound + g1.quad_error + g2.quad_error;
        }
        let tail = commutator_tail(1, 12, 1.0, 0.1, 1.0).map_err(e)?.value;
        Ok((cont && tail < 1e-6, format!("continuity bound {}; tail after 12 terms at (1, 1, 0.1) = {tail:.3e} (tol 1e-6)", if cont { "holds" } else { "violated" })))
    });

    run.criterion(13, "symplectic bases and regularity decompositions", 30.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut bad = 0;
        for k in 0..500 {
            let dim = 2 * (1 + k % 4);
            let space = random_exact_space(&mut rng, dim).map_err(e)?;
            let b = symplectic_basis(&space).map_err(e)?;
            let x_r = random_subspace(&mut rng, &space).map_err(e)?;
            let d = regularity_decomposition(&space, &x_r, &radical(&space, &x_r)).map_err(e)?;
            if canonical_gram_defect(&space, &b) != 0.0 || !verify_decomposition(&space, &d) {
                bad += 1;
            }
        }
        Ok((bad == 0, format!("{bad} of 500 random forms (dims 2–8) failed exact Gram or decomposition checks")))
    });

    let total = 13 - run.failed.len();
    println!("acceptance: {total}/13 criteria pass");
    if !run.failed.is_empty() {
        println!("failing criteria: {:?}", run.failed);
        std::process::exit(1);
    }
}
