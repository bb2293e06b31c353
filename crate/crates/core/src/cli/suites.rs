//! The verification suites behind each subcommand.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use super::config::{rational_matrix, SpaceSpec};
use super::report::{Record, Series, Verdict};
use crate::dynamics::{
    bound_violations, cocycle_hs_norm_sq, cocycle_hs_norm_sq_2d, commutator_tail, continuity_bound,
    dyson_cocycle, exact_cocycle, hermite_matrix_elements, oscillator_hamiltonian, weight_constant,
    weighted_norm_sq, weighted_norm_sq_quadrature, DysonConfig, HermiteConfig, LatticeModel,
    Potential, SiteInterval,
};
use crate::error::{Error, Result};
use crate::fockrep::{LaplaceConfig, TruncatedRep};
use crate::linalg::{c, compress, op_norm, to_complex, CMat, RealEig};
use crate::resolvsym::{
    cq, rational_from_json, relation_instances, simplify, von_neumann_expand, Poly,
    SimplifyOptions, Q,
};
use crate::states::{
    dirac_derivative_check, dirac_poly_value, fock_covariance, quasifree_resolvent_value,
    DiracConstraintSet, DiracValue, QuasifreeConfig,
};
use crate::symplin::{
    canonical_gram_defect, radical, regularity_decomposition, symplectic_basis,
    verify_decomposition, ExactSpace, FloatSpace, Scalar, Subspace,
};

/// Settings shared by every job of a run.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub seed: Option<u64>,
    pub tol_scale: f64,
}

impl Ctx {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0));
        r.set_stream(stream);
        r
    }
}

pub type Job = Box<dyn Fn(&Ctx) -> Record + Send + Sync>;
pub type SeriesFn = Box<dyn Fn(&[Record]) -> Vec<Series> + Send + Sync>;

pub struct Suite {
    pub jobs: Vec<Job>,
    pub series: SeriesFn,
    pub randomized: bool,
}

impl Suite {
    fn new(jobs: Vec<Job>, randomized: bool) -> Self {
        Suite {
            jobs,
            series: Box::new(|_| Vec::new()),
            randomized,
        }
    }

    fn with_series(mut self, f: impl Fn(&[Record]) -> Vec<Series> + Send + Sync + 'static) -> Self {
        self.series = Box::new(f);
        self
    }
}

type Outcome = (Value, Value, Verdict);

fn job<F>(name: impl Into<String>, inputs: Value, f: F) -> Job
where
    F: Fn(&Ctx) -> Result<Outcome> + Send + Sync + 'static,
{
    let name = name.into();
    Box::new(move |ctx| {
        let start = Instant::now();
        let mut rec = match f(ctx) {
            Ok((v, b, verdict)) => Record::new(name.clone(), inputs.clone()).with(v, b, verdict),
            Err(e) => Record::from_error(name.clone(), inputs.clone(), &e),
        };
        rec.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        rec
    })
}

fn series_from(
    name: &str,
    columns: &[&str],
    records: &[Record],
    prefix: &str,
    row: impl Fn(&Record) -> Option<Vec<f64>>,
) -> Series {
    Series {
        name: name.to_string(),
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows: records
            .iter()
            .filter(|r| r.name.starts_with(prefix))
            .filter_map(row)
            .collect(),
    }
}

fn num(v: &Value, key: &str) -> Option<f64> {
    v.get(key).and_then(Value::as_f64)
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

// ---------------------------------------------------------------- relations

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelationsConfig {
    pub space: SpaceSpec,
    pub instances: usize,
    pub budget: usize,
    pub degree_cap: usize,
}

impl Default for RelationsConfig {
    fn default() -> Self {
        RelationsConfig {
            space: SpaceSpec::Standard(2),
            instances: 200,
            budget: 400,
            degree_cap: 12,
        }
    }
}

pub fn relations(cfg: RelationsConfig) -> Result<Suite> {
    if !cfg.space.is_random() {
        cfg.space.build(&mut ChaCha8Rng::seed_from_u64(0))?;
    }
    let cfg = Arc::new(cfg);
    let jobs = (0..cfg.instances)
        .map(|i| {
            let cfg = cfg.clone();
            job(
                format!("relations/{i:03}"),
                json!({ "instance": i }),
                move |ctx| {
                    let mut rng = ctx.rng(i as u64);
                    let space = cfg.space.build(&mut rng)?;
                    let opts = SimplifyOptions {
                        budget: cfg.budget,
                        degree_cap: cfg.degree_cap,
                        trace: false,
                    };
                    let mut reduced = serde_json::Map::new();
                    let mut steps = serde_json::Map::new();
                    let mut all = true;
                    for inst in relation_instances(&space, &mut rng)? {
                        let out = simplify(&inst.difference(), &space, &opts)?;
                        let ok = out.poly.is_zero();
                        all &= ok;
                        reduced.insert(inst.name.into(), json!(ok));
                        steps.insert(inst.name.into(), json!(out.steps));
                    }
                    Ok((
                        json!({ "reduced": reduced, "steps": steps }),
                        json!({ "budget": cfg.budget }),
                        Verdict::from_bool(all),
                    ))
                },
            )
        })
        .collect();
    Ok(Suite::new(jobs, true))
}

// ---------------------------------------------------------------- rep

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VonNeumannSpec {
    pub lambda0: f64,
    pub lambda: f64,
    pub order: usize,
    pub cutoff: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepConfig {
    pub norm_cutoff: usize,
    pub lambdas: Vec<f64>,
    /// Field coordinates on the one-mode standard space; q, p and q+p by default.
    pub fields: Option<Vec<Vec<f64>>>,
    pub ccr_cutoffs: Vec<usize>,
    pub weyl_cutoffs: Vec<usize>,
    pub weyl_f: Vec<f64>,
    pub weyl_g: Vec<f64>,
    pub level_fraction: usize,
    pub von_neumann: VonNeumannSpec,
    /// Cutoffs for the Hilbert–Schmidt norm of R(1,p)R(1,q); consecutive pairs are compared.
    pub hs_cutoffs: Vec<usize>,
    pub hs_rel_tol: f64,
}

impl Default for RepConfig {
    fn default() -> Self {
        RepConfig {
            norm_cutoff: 129,
            lambdas: vec![0.5, 1.0, 2.0, 5.0],
            fields: None,
            ccr_cutoffs: vec![32, 64, 128],
            weyl_cutoffs: vec![64, 128],
            weyl_f: vec![0.5, 0.2],
            weyl_g: vec![-0.3, 0.6],
            level_fraction: 4,
            von_neumann: VonNeumannSpec {
                lambda0: 1.0,
                lambda: 1.5,
                order: 30,
                cutoff: 64,
            },
            hs_cutoffs: vec![128, 256],
            hs_rel_tol: 0.01,
        }
    }
}

/// Compressed defects of the Weyl relation and of the adjoint action at one cutoff.
pub fn weyl_defects(
    n: usize,
    f: &[f64],
    g: &[f64],
    lambda: f64,
    level_fraction: usize,
) -> Result<(f64, f64)> {
    let rep = TruncatedRep::standard(1, n);
    let idx = rep.low_levels(n / level_fraction);
    let sum: Vec<f64> = f.iter().zip(g).map(|(a, b)| a + b).collect();
    let sigma = rep.space().sigma(f, g)?;
    let lhs = rep.weyl_matrix(f)? * rep.weyl_matrix(g)?;
    let rhs = rep.weyl_matrix(&sum)? * Complex64::from_polar(1.0, -sigma / 2.0);
    let weyl = op_norm(&compress(&(lhs - rhs), &idx));
    let w = rep.weyl_matrix(f)?;
    let act = &w * rep.resolvent_matrix(c(lambda, 0.0), g)? * w.adjoint();
    let s = rep.space().sigma(g, f)?;
    let want = rep.resolvent_matrix(c(lambda, s), g)?;
    Ok((weyl, op_norm(&compress(&(act - want), &idx))))
}

/// ‖[Q,P] − i𝟙‖ on levels below N − 1.
pub fn ccr_defect(n: usize) -> f64 {
    let rep = TruncatedRep::standard(1, n);
    let (qm, pm) = (rep.q_matrix(0), rep.p_matrix(0));
    let comm = &qm * &pm - &pm * &qm - CMat::identity(n, n) * c(0.0, 1.0);
    op_norm(&compress(&comm, &rep.low_levels(n - 1)))
}

const FLOOR: f64 = 1e-12;

pub fn rep(cfg: RepConfig) -> Result<Suite> {
    if cfg.level_fraction == 0 || cfg.norm_cutoff < 2 {
        return Err(Error::InvalidArgument(
            "cutoffs and level_fraction must be positive".into(),
        ));
    }
    let base = TruncatedRep::standard(1, 2);
    let (qv, pv) = (base.basis().q[0].clone(), base.basis().p[0].clone());
    let fields = cfg.fields.clone().unwrap_or_else(|| {
        vec![
            qv.clone(),
            pv.clone(),
            qv.iter().zip(&pv).map(|(a, b)| a + b).collect(),
        ]
    });
    for f in fields.iter().chain([&cfg.weyl_f, &cfg.weyl_g]) {
        if f.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: f.len(),
            });
        }
    }
    let mut jobs: Vec<Job> = Vec::new();
    let n = cfg.norm_cutoff;
    for &lam in &cfg.lambdas {
        if lam == 0.0 {
            return Err(Error::ImaginaryParameter);
        }
        for f in &fields {
            let f = f.clone();
            jobs.push(job(
                format!("norm/l={lam}/f={f:?}"),
                json!({ "lambda": lam, "f": f, "cutoff": n }),
                move |ctx| {
                    let rep = TruncatedRep::standard(1, n);
                    let norm = op_norm(&rep.resolvent_matrix(c(lam, 0.0), &f)?);
                    let err = (norm - 1.0 / lam.abs()).abs();
                    let tol = 1e-10 * ctx.tol_scale;
                    Ok((
                        json!({ "norm": norm, "error": err }),
                        json!({ "expected": 1.0 / lam.abs(), "tol": tol }),
                        Verdict::from_bool(err < tol),
                    ))
                },
            ));
        }
    }
    for &m in &cfg.ccr_cutoffs {
        jobs.push(job(
            format!("ccr/N={m}"),
            json!({ "cutoff": m }),
            move |ctx| {
                let d = ccr_defect(m);
                let tol = 1e-10 * ctx.tol_scale;
                Ok((
                    json!({ "defect": d }),
                    json!({ "tol": tol }),
                    Verdict::from_bool(d < tol),
                ))
            },
        ));
    }
    {
        let cfg = cfg.clone();
        jobs.push(job(
            "weyl",
            json!({ "cutoffs": cfg.weyl_cutoffs, "f": cfg.weyl_f, "g": cfg.weyl_g }),
            move |ctx| {
                let mut weyl = Vec::new();
                let mut adj = Vec::new();
                for &m in &cfg.weyl_cutoffs {
                    let (w, a) =
                        weyl_defects(m, &cfg.weyl_f, &cfg.weyl_g, 1.5, cfg.level_fraction)?;
                    weyl.push(w);
                    adj.push(a);
                }
                let tol = 1e-6 * ctx.tol_scale;
                let settles = |v: &[f64]| {
                    let last = *v.last().unwrap_or(&f64::INFINITY);
                    last < tol && v.windows(2).all(|w| w[1] < w[0] || w[1] <= FLOOR)
                };
                let ok = settles(&weyl) && settles(&adj);
                Ok((
                    json!({ "weyl_relation": weyl, "adjoint_action": adj }),
                    json!({ "tol": tol, "floor": FLOOR }),
                    Verdict::from_bool(ok),
                ))
            },
        ));
    }
    {
        let vn = cfg.von_neumann.clone();
        let f = qv.clone();
        jobs.push(job("von_neumann", json!({ "lambda0": vn.lambda0, "lambda": vn.lambda, "order": vn.order, "cutoff": vn.cutoff }), move |_| {
            let rep = TruncatedRep::standard(1, vn.cutoff);
            let fq: Vec<Q> = f.iter().map(|&x| Q::from_f64(x)).collect();
            let (poly, tail) = von_neumann_expand(&Q::from_f64(vn.lambda), &Q::from_f64(vn.lambda0), &fq, vn.order)?;
            let diff = op_norm(&(rep.poly_matrix(&poly)? - rep.resolvent_matrix(c(vn.lambda, 0.0), &f)?));
            Ok((json!({ "difference": diff }), json!({ "tail_bound": tail }), Verdict::from_bool(diff <= tail + FLOOR)))
        }));
    }
    if cfg.hs_cutoffs.len() >= 2 {
        let (cuts, rel_tol) = (cfg.hs_cutoffs.clone(), cfg.hs_rel_tol);
        jobs.push(job("compact_ideal", json!({ "cutoffs": cuts }), move |ctx| {
            let mut norms = Vec::new();
            let mut identity = Vec::new();
            for &m in &cuts {
                let rep = TruncatedRep::standard(1, m);
                let b = rep.basis().clone();
                norms.push(rep.compact_product_hs(&[(1.0, b.p[0].clone()), (1.0, b.q[0].clone())])?);
                identity.push((m as f64).sqrt());
            }
            let changes: Vec<f64> = norms.windows(2).map(|w| ((w[1] - w[0]) / w[1]).abs()).collect();
            let tol = rel_tol * ctx.tol_scale;
            let grows = cuts.windows(2).all(|w| w[1] > w[0]);
            Ok((
                json!({ "hs_norms": norms, "relative_changes": changes, "identity_hs": identity }),
                json!({ "relative_tol": tol }),
                Verdict::from_bool(grows && changes.iter().all(|c| *c < tol)),
            ))
        }));
    }
    Ok(Suite::new(jobs, false).with_series(|records| {
        let mut rows = Vec::new();
        for r in records.iter().filter(|r| r.name == "weyl") {
            let cut = r.inputs["cutoffs"].as_array().cloned().unwrap_or_default();
            for (k, n) in cut.iter().enumerate() {
                let w = r.values["weyl_relation"].get(k).and_then(Value::as_f64);
                let a = r.values["adjoint_action"].get(k).and_then(Value::as_f64);
                if let (Some(n), Some(w), Some(a)) = (n.as_f64(), w, a) {
                    rows.push(vec![n, w, a]);
                }
            }
        }
        let ccr = series_from("ccr_defect", &["cutoff", "defect"], records, "ccr/", |r| {
            Some(vec![
                r.inputs["cutoff"].as_f64()?,
                num(&r.values, "defect")?,
            ])
        });
        vec![
            Series {
                name: "weyl_defect".into(),
                columns: vec!["cutoff".into(), "weyl".into(), "adjoint".into()],
                rows,
            },
            ccr,
        ]
    }))
}

// ---------------------------------------------------------------- laplace

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaplaceSuiteConfig {
    pub cutoff: usize,
    pub lambdas: Vec<f64>,
    pub field: Option<Vec<f64>>,
    pub level_fraction: usize,
    pub abs_tol: f64,
}

impl Default for LaplaceSuiteConfig {
    fn default() -> Self {
        LaplaceSuiteConfig {
            cutoff: 128,
            lambdas: vec![1.0, -1.0, 2.0, -2.0],
            field: None,
            level_fraction: 4,
            abs_tol: 1e-11,
        }
    }
}

/// Compressed ‖Laplace transform − resolvent‖ and the quadrature error estimate.
pub fn laplace_defect(
    n: usize,
    lambda: f64,
    f: &[f64],
    level_fraction: usize,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    let rep = TruncatedRep::standard(1, n);
    let idx = rep.low_levels(n / level_fraction);
    let cfg = LaplaceConfig {
        columns: Some(idx.clone()),
        abs_tol,
        ..Default::default()
    };
    let lap = rep.laplace_resolvent(lambda, f, &cfg)?;
    let direct = rep.resolvent_matrix(c(lambda, 0.0), f)?;
    let want = CMat::from_fn(idx.len(), idx.len(), |i, j| direct[(idx[i], idx[j])]);
    let got = CMat::from_fn(idx.len(), idx.len(), |i, j| lap.matrix[(idx[i], j)]);
    Ok((op_norm(&(got - want)), lap.error))
}

pub fn laplace(cfg: LaplaceSuiteConfig) -> Result<Suite> {
    if cfg.level_fraction == 0 || cfg.cutoff < 2 {
        return Err(Error::InvalidArgument(
            "cutoff and level_fraction must be positive".into(),
        ));
    }
    let f = cfg
        .field
        .clone()
        .unwrap_or_else(|| TruncatedRep::standard(1, 2).basis().q[0].clone());
    if f.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.len(),
        });
    }
    let jobs = cfg
        .lambdas
        .iter()
        .map(|&lam| {
            let (f, cfg) = (f.clone(), cfg.clone());
            job(
                format!("laplace/l={lam}"),
                json!({ "lambda": lam, "cutoff": cfg.cutoff, "f": f }),
                move |ctx| {
                    let (d, e) =
                        laplace_defect(cfg.cutoff, lam, &f, cfg.level_fraction, cfg.abs_tol)?;
                    let tol = 1e-6 * ctx.tol_scale;
                    Ok((
                        json!({ "defect": d, "quad_error": e }),
                        json!({ "tol": tol }),
                        Verdict::from_bool(d < tol),
                    ))
                },
            )
        })
        .collect();
    Ok(Suite::new(jobs, false).with_series(|records| {
        vec![series_from(
            "laplace_defect",
            &["lambda", "defect"],
            records,
            "laplace/",
            |r| {
                Some(vec![
                    r.inputs["lambda"].as_f64()?,
                    num(&r.values, "defect")?,
                ])
            },
        )]
    }))
}

// ---------------------------------------------------------------- quasifree

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSpec {
    pub modes: usize,
    pub cutoff: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuasifreeSuiteConfig {
    pub representations: Vec<FockSpec>,
    pub directions: usize,
    /// Truncation allowance added to the quadrature error estimate.
    pub tol: f64,
    pub quad_tol: f64,
}

impl Default for QuasifreeSuiteConfig {
    fn default() -> Self {
        QuasifreeSuiteConfig {
            representations: vec![
                FockSpec {
                    modes: 1,
                    cutoff: 256,
                },
                FockSpec {
                    modes: 2,
                    cutoff: 64,
                },
            ],
            directions: 20,
            tol: 1e-5,
            quad_tol: 1e-8,
        }
    }
}

/// Quasifree and Fock-vacuum values of a resolvent chain, with the quadrature error.
pub fn quasifree_pair(
    rep: &TruncatedRep,
    chain: &[(f64, Vec<f64>)],
    quad_tol: f64,
) -> Result<(Complex64, Complex64, f64)> {
    let space = FloatSpace::standard(rep.modes());
    let cov = fock_covariance(&space, rep.basis())?;
    let qf = quasifree_resolvent_value(
        &cov,
        chain,
        &QuasifreeConfig {
            tol: quad_tol,
            ..Default::default()
        },
    )?;
    let mut block = CMat::from_column_slice(rep.dim(), 1, rep.vacuum().as_slice());
    for (lam, f) in chain.iter().rev() {
        rep.apply_resolvent(c(*lam, 0.0), f, &mut block)?;
    }
    // The vacuum is the first basis vector.
    Ok((qf.value, block[(0, 0)], qf.error))
}

/// A unit field vector and λ with 1 ≤ |λ| ≤ 2 of random sign.
pub fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> (f64, Vec<f64>) {
    let f = loop {
        let f: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            break f.iter().map(|x| x / n).collect();
        }
    };
    let lam = rng.gen_range(1.0..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    (lam, f)
}

pub fn quasifree(cfg: QuasifreeSuiteConfig) -> Result<Suite> {
    let mut jobs: Vec<Job> = Vec::new();
    for (r, spec) in cfg.representations.iter().enumerate() {
        if spec.modes == 0 || spec.cutoff < 2 {
            return Err(Error::InvalidArgument(
                "modes and cutoff must be positive".into(),
            ));
        }
        let rep = Arc::new(TruncatedRep::standard(spec.modes, spec.cutoff));
        if rep.dim() > crate::fockrep::DENSE_LIMIT {
            return Err(Error::Budget(format!(
                "Fock dimension {} exceeds {}",
                rep.dim(),
                crate::fockrep::DENSE_LIMIT
            )));
        }
        for j in 0..cfg.directions {
            let (rep, cfg) = (rep.clone(), cfg.clone());
            let modes = spec.modes;
            let inputs = json!({ "direction": j, "modes": modes, "cutoff": spec.cutoff });
            jobs.push(job(format!("quasifree/m{modes}/{j:02}"), inputs, move |ctx| {
                let mut rng = ctx.rng(((r as u64) << 32) | j as u64);
                let a = random_direction(&mut rng, 2 * modes);
                let b = random_direction(&mut rng, 2 * modes);
                let (q1, f1, e1) = quasifree_pair(&rep, std::slice::from_ref(&a), cfg.quad_tol)?;
                let (q2, f2, e2) = quasifree_pair(&rep, &[a.clone(), b.clone()], cfg.quad_tol)?;
                let (d1, d2) = ((q1 - f1).norm(), (q2 - f2).norm());
                let tol = cfg.tol * ctx.tol_scale;
                Ok((
                    json!({
                        "chain1": { "quasifree": c_json(q1), "fock": c_json(f1), "difference": d1, "quad_error": e1 },
                        "chain2": { "quasifree": c_json(q2), "fock": c_json(f2), "difference": d2, "quad_error": e2 },
                        "lambdas": [a.0, b.0], "f": a.1, "g": b.1,
                    }),
                    json!({ "allowance": tol }),
                    Verdict::from_bool(d1 < e1 + tol && d2 < e2 + tol),
                ))
            }));
        }
    }
    Ok(Suite::new(jobs, true))
}

// ---------------------------------------------------------------- dirac

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativeSpec {
    pub cutoff: usize,
    pub mu: f64,
    pub g: Option<Vec<f64>>,
    pub steps: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiracSuiteConfig {
    pub modes: usize,
    pub constraint: Vec<Vec<Value>>,
    pub lambdas: Vec<Value>,
    pub derivative: DerivativeSpec,
}

impl Default for DiracSuiteConfig {
    fn default() -> Self {
        DiracSuiteConfig {
            modes: 2,
            constraint: vec![
                vec![json!(1), json!(0), json!(0), json!(0)],
                vec![json!(0), json!(0), json!(1), json!(0)],
            ],
            lambdas: vec![json!(1), json!(2), json!("-1/2")],
            derivative: DerivativeSpec {
                cutoff: 32,
                mu: 1.0,
                g: None,
                steps: vec![0.2, 0.1, 0.05, 0.025],
            },
        }
    }
}

/// 1/(iλ) as an exact complex rational.
fn inv_i(l: &Q) -> crate::resolvsym::CQ {
    cq(Q::zero(), -(Q::one() / l.clone()))
}

pub fn dirac(cfg: DiracSuiteConfig) -> Result<Suite> {
    let space = ExactSpace::standard(cfg.modes);
    let basis = rational_matrix(&cfg.constraint)?;
    let cset = DiracConstraintSet::new(&space, Subspace::new(&space, basis.clone())?)?;
    let lambdas: Vec<Q> = cfg
        .lambdas
        .iter()
        .map(rational_from_json)
        .collect::<Result<_>>()?;
    if lambdas.is_empty() || lambdas.iter().any(Zero::is_zero) {
        return Err(Error::InvalidArgument("lambdas must be nonzero".into()));
    }
    let shared = Arc::new((space, cset, basis, lambdas));
    let mut jobs: Vec<Job> = Vec::new();
    {
        let s = shared.clone();
        jobs.push(job(
            "dirac/constraint_values",
            json!({ "constraint": cfg.constraint }),
            move |_| {
                let (space, cset, basis, lambdas) = &*s;
                let mut vecs = basis.clone();
                let sum: Vec<Q> = (0..space.dim())
                    .map(|k| basis.iter().fold(Q::zero(), |a, b| a + b[k].clone()))
                    .collect();
                vecs.push(sum);
                let mut worst = 0.0f64;
                let mut exact = true;
                for f in &vecs {
                    for l in lambdas {
                        let p = Poly::resolvent(cq(l.clone(), Q::zero()), f.clone())?;
                        match dirac_poly_value(cset, &p, space)? {
                            DiracValue::Value(v) => {
                                exact &= v == inv_i(l);
                                worst = worst.max(
                                    (crate::resolvsym::cq_to_c64(&v)
                                        - crate::resolvsym::cq_to_c64(&inv_i(l)))
                                    .norm(),
                                );
                            }
                            DiracValue::Undetermined => exact = false,
                        }
                    }
                }
                Ok((
                    json!({ "exact": exact, "max_difference": worst }),
                    json!({ "expected": "1/(i lambda)" }),
                    Verdict::from_bool(exact),
                ))
            },
        ));
    }
    {
        let s = shared.clone();
        jobs.push(job("dirac/products", json!({}), move |_| {
            let (space, cset, basis, lambdas) = &*s;
            let mut p = Poly::one();
            let mut want = cq(Q::one(), Q::zero());
            for (k, l) in lambdas.iter().enumerate() {
                let f = basis[k % basis.len()].clone();
                p = p.mul(&Poly::resolvent(cq(l.clone(), Q::zero()), f)?);
                want *= inv_i(l);
            }
            let got = dirac_poly_value(cset, &p, space)?;
            let ok = got == DiracValue::Value(want.clone());
            Ok((
                json!({ "value": got.to_c64().map(c_json) }),
                json!({ "expected": c_json(crate::resolvsym::cq_to_c64(&want)) }),
                Verdict::from_bool(ok),
            ))
        }));
    }
    {
        let s = shared.clone();
        jobs.push(job("dirac/annihilated", json!({}), move |_| {
            let (space, cset, basis, lambdas) = &*s;
            // a coordinate vector pairing nontrivially with the constraint set
            let g = (0..space.dim())
                .map(|k| (0..space.dim()).map(|j| if j == k { Q::one() } else { Q::zero() }).collect::<Vec<Q>>())
                .find(|e| basis.iter().any(|b| !space.sigma_vanishes(e, b)))
                .ok_or_else(|| Error::InvalidArgument("constraint set pairs trivially with every coordinate vector".into()))?;
            let l = lambdas[0].clone();
            let p = Poly::resolvent(cq(l.clone(), Q::zero()), basis[0].clone())?.mul(&Poly::resolvent(cq(l, Q::zero()), g.clone())?);
            let got = dirac_poly_value(cset, &p, space)?;
            let ok = got == DiracValue::Value(cq(Q::zero(), Q::zero()));
            Ok((json!({ "value": got.to_c64().map(c_json), "g": g.iter().map(|x| x.to_f64()).collect::<Vec<_>>() }), json!({ "expected": 0.0 }), Verdict::from_bool(ok)))
        }));
    }
    {
        let d = cfg.derivative.clone();
        jobs.push(job(
            "dirac/derivative",
            json!({ "cutoff": d.cutoff, "mu": d.mu, "steps": d.steps }),
            move |_| {
                let rep = TruncatedRep::standard(1, d.cutoff);
                let g = d.g.clone().unwrap_or_else(|| rep.basis().p[0].clone());
                let defects: Vec<f64> = d
                    .steps
                    .iter()
                    .map(|&h| dirac_derivative_check(&rep, d.mu, &g, h))
                    .collect::<Result<_>>()?;
                let ratios: Vec<f64> = defects.windows(2).map(|w| w[0] / w[1]).collect();
                let ok = !ratios.is_empty() && ratios.iter().all(|r| (3.5..=4.5).contains(r));
                Ok((
                    json!({ "defects": defects, "ratios": ratios }),
                    json!({ "ratio_range": [3.5, 4.5] }),
                    Verdict::from_bool(ok),
                ))
            },
        ));
    }
    Ok(Suite::new(jobs, false))
}

// ---------------------------------------------------------------- cocycle

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleCase {
    pub potential: Potential,
    pub t: f64,
    #[serde(default)]
    pub expected: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DysonSpec {
    pub cutoff: usize,
    pub order: usize,
    pub t: f64,
    pub potential: Potential,
    /// Potentials s·V for each listed s; consecutive entries form the compared pairs.
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorSpec {
    pub n0: usize,
    pub vnorm: f64,
    pub t: f64,
    pub r0_norm: f64,
    pub max_order: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CocycleConfig {
    pub cases: Vec<CocycleCase>,
    pub dyson: Option<DysonSpec>,
    pub commutator: Option<CommutatorSpec>,
}

impl Default for CocycleConfig {
    fn default() -> Self {
        CocycleConfig {
            cases: vec![
                CocycleCase {
                    potential: Potential::OddGaussian { a: 1.0 },
                    t: 1.0,
                    expected: None,
                },
                CocycleCase {
                    potential: Potential::MexicanHat { a: 1.0, s: 1.2 },
                    t: 0.8,
                    expected: None,
                },
                CocycleCase {
                    potential: Potential::MexicanHat { a: 0.5, s: 0.7 },
                    t: -1.5,
                    expected: None,
                },
                CocycleCase {
                    potential: Potential::Gaussian { a: 1.0, s: 1.0 },
                    t: 1.0,
                    expected: None,
                },
            ],
            dyson: Some(DysonSpec {
                cutoff: 10,
                order: 24,
                t: 1.0,
                potential: Potential::Bump { a: 1.0, r: 1.5 },
                scales: vec![1.0, 0.5, -0.3],
            }),
            commutator: Some(CommutatorSpec {
                n0: 1,
                vnorm: 1.0,
                t: 0.1,
                r0_norm: 1.0,
                max_order: 12,
                threshold: 1e-6,
            }),
        }
    }
}

/// V(Q) for the truncated single-mode position operator.
pub fn potential_operator(pot: &Potential, cutoff: usize) -> CMat {
    let rep = TruncatedRep::standard(1, cutoff);
    let qm: DMatrix<f64> = rep.q_matrix(0).map(|z| z.re);
    let e = RealEig::new(&qm);
    to_complex(&e.apply_fn(|x| pot.value(x)))
}

pub fn cocycle(cfg: CocycleConfig) -> Result<Suite> {
    let mut jobs: Vec<Job> = Vec::new();
    for (k, case) in cfg.cases.iter().enumerate() {
        case.potential.validate()?;
        let case = case.clone();
        let inputs = json!({ "potential": case.potential, "t": case.t, "expected": case.expected });
        jobs.push(job(format!("cocycle/{k}"), inputs, move |ctx| {
            let one = match cocycle_hs_norm_sq(&case.potential, case.t) {
                Ok(v) => v,
                Err(Error::Divergent(m)) => {
                    return Ok((json!({ "divergent": m }), Value::Null, Verdict::Flagged));
                }
                Err(e) => return Err(e),
            };
            let two = cocycle_hs_norm_sq_2d(&case.potential, case.t)?;
            let rel = if one.value == 0.0 {
                (two.value).abs()
            } else {
                ((one.value - two.value) / one.value).abs()
            };
            let rel_tol = 1e-3 * ctx.tol_scale;
            let mut ok = rel < rel_tol;
            let mut values =
                json!({ "one_d": one.value, "two_d": two.value, "relative_difference": rel });
            if let Some(e) = case.expected {
                let err = (one.value - e).abs();
                ok &= err < 1e-6 * ctx.tol_scale;
                values["expected_error"] = json!(err);
            }
            Ok((
                values,
                json!({ "relative_tol": rel_tol, "expected_tol": 1e-6 * ctx.tol_scale }),
                Verdict::from_bool(ok),
            ))
        }));
    }
    if let Some(d) = cfg.dyson.clone() {
        d.potential.validate()?;
        let d = Arc::new(d);
        for (k, &s) in d.scales.iter().enumerate() {
            let d = d.clone();
            jobs.push(job(format!("dyson/exact/{k}"), json!({ "scale": s, "t": d.t, "order": d.order, "cutoff": d.cutoff }), move |_| {
                let rep = TruncatedRep::standard(1, d.cutoff);
                let h0 = oscillator_hamiltonian(&rep);
                let v = potential_operator(&d.potential.scaled(s), d.cutoff);
                let r = dyson_cocycle(&h0, &v, d.t, d.order, &DysonConfig::default())?;
                let err = op_norm(&(&r.matrix - exact_cocycle(&h0, &v, d.t)?));
                let bound = r.tail_bound + r.quad_error + FLOOR;
                let verdict = if r.flagged { Verdict::Flagged } else { Verdict::from_bool(err <= bound) };
                Ok((json!({ "error": err, "tail_bound": r.tail_bound, "quad_error": r.quad_error }), json!({ "bound": bound }), verdict))
            }));
        }
        for k in 1..d.scales.len() {
            let d = d.clone();
            let (s1, s2) = (d.scales[k - 1], d.scales[k]);
            jobs.push(job(
                format!("dyson/continuity/{k}"),
                json!({ "scales": [s1, s2], "t": d.t }),
                move |_| {
                    let rep = TruncatedRep::standard(1, d.cutoff);
                    let h0 = oscillator_hamiltonian(&rep);
                    let v1 = potential_operator(&d.potential.scaled(s1), d.cutoff);
                    let v2 = potential_operator(&d.potential.scaled(s2), d.cutoff);
                    let cfg = DysonConfig::default();
                    let g1 = dyson_cocycle(&h0, &v1, d.t, d.order, &cfg)?;
                    let g2 = dyson_cocycle(&h0, &v2, d.t, d.order, &cfg)?;
                    let lhs = op_norm(&(&g1.matrix - &g2.matrix));
                    let bound =
                        continuity_bound(op_norm(&(&v1 - &v2)), op_norm(&v1), op_norm(&v2), d.t);
                    let slack =
                        g1.tail_bound + g1.quad_error + g2.tail_bound + g2.quad_error + FLOOR;
                    Ok((
                        json!({ "difference": lhs }),
                        json!({ "bound": bound, "slack": slack }),
                        Verdict::from_bool(lhs <= bound + slack),
                    ))
                },
            ));
        }
    }
    if let Some(cs) = cfg.commutator.clone() {
        jobs.push(job(
            "commutator_tail",
            json!({ "n0": cs.n0, "vnorm": cs.vnorm, "t": cs.t, "r0_norm": cs.r0_norm }),
            move |ctx| {
                let tails: Vec<f64> = (0..=cs.max_order)
                    .map(|n| commutator_tail(cs.n0, n, cs.vnorm, cs.t, cs.r0_norm).map(|t| t.value))
                    .collect::<Result<_>>()?;
                if tails.iter().any(|t| t.is_infinite()) {
                    return Ok((
                        json!({ "divergent": true }),
                        json!({ "radius": 1.0 / (4.0 * cs.vnorm) }),
                        Verdict::Flagged,
                    ));
                }
                let last = *tails.last().unwrap_or(&f64::INFINITY);
                let decreasing = tails.windows(2).all(|w| w[1] < w[0] || w[0] == 0.0);
                let thr = cs.threshold * ctx.tol_scale;
                Ok((
                    json!({ "tails": tails, "last": last }),
                    json!({ "threshold": thr }),
                    Verdict::from_bool(decreasing && last < thr),
                ))
            },
        ));
    }
    Ok(Suite::new(jobs, false).with_series(|records| {
        let rows = records
            .iter()
            .filter(|r| r.name == "commutator_tail")
            .flat_map(|r| {
                r.values["tails"]
                    .as_array()
                    .cloned()
                    .unwrap_or_default()
                    .into_iter()
                    .enumerate()
                    .filter_map(|(n, v)| Some(vec![n as f64, v.as_f64()?]))
            })
            .collect();
        vec![Series {
            name: "commutator_tail".into(),
            columns: vec!["order".into(), "tail".into()],
            rows,
        }]
    }))
}

// ---------------------------------------------------------------- lattice

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HermiteSpec {
    pub potential: Potential,
    pub t: f64,
    pub m: usize,
    pub norm_max: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub cutoff: usize,
    pub sites: usize,
    pub potential: Option<Potential>,
    pub mus: Vec<f64>,
    pub energy_tol: f64,
    pub lanczos_above: usize,
    pub hermite: Option<HermiteSpec>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            cutoff: 10,
            sites: 2,
            potential: None,
            mus: vec![0.5, 1.0, 2.0, 5.0],
            energy_tol: 1e-6,
            lanczos_above: 512,
            hermite: None,
        }
    }
}

pub fn lattice(cfg: LatticeConfig) -> Result<Suite> {
    if cfg.sites == 0 {
        return Err(Error::InvalidArgument("sites must be positive".into()));
    }
    let mut model = LatticeModel::new(
        SiteInterval::new(0, cfg.sites as i64 - 1)?,
        cfg.cutoff,
        cfg.potential.clone(),
    )?;
    model.lanczos_above = cfg.lanczos_above;
    model.dim(&model.sites())?;
    let model = Arc::new(model);
    let free = cfg.potential.as_ref().is_none_or(|p| p.sup_norm() == 0.0);
    let mut jobs: Vec<Job> = Vec::new();
    for len in 1..=cfg.sites {
        let m = model.clone();
        let tol = cfg.energy_tol;
        jobs.push(job(format!("ground/{len}"), json!({ "sites": len, "cutoff": cfg.cutoff }), move |ctx| {
            let g = m.ground_state(&SiteInterval::new(0, len as i64 - 1)?)?;
            let res_ok = g.residual <= 1e-8 * g.h_norm.max(1.0);
            let mut ok = res_ok && g.gap > 0.0;
            let mut bounds = json!({ "residual_tol": 1e-8 * g.h_norm.max(1.0) });
            if free {
                ok &= (g.energy - len as f64).abs() < tol * ctx.tol_scale;
                bounds["expected"] = json!(len as f64);
            }
            Ok((
                json!({ "energy": g.energy, "gap": g.gap, "residual": g.residual, "solver": g.solver, "dim": g.dim, "vacuum_overlap": g.vacuum_overlap() }),
                bounds,
                Verdict::from_bool(ok),
            ))
        }));
    }
    for n in 2..=cfg.sites {
        for msz in 1..n {
            let m = model.clone();
            jobs.push(job(
                format!("superadditivity/{n}/{msz}"),
                json!({ "n": n, "m": msz }),
                move |_| {
                    let outer = SiteInterval::new(0, n as i64 - 1)?;
                    let inner = outer.centered(msz)?;
                    let r = m.superadditivity(&outer, &inner)?;
                    Ok((
                        serde_json::to_value(r).expect("serializable"),
                        json!({ "lower": r.bound }),
                        Verdict::from_bool(r.holds),
                    ))
                },
            ));
            let m = model.clone();
            let mus = cfg.mus.clone();
            jobs.push(job(format!("sandwich/{n}/{msz}"), json!({ "n": n, "m": msz, "mus": mus }), move |_| {
                let outer = SiteInterval::new(0, n as i64 - 1)?;
                let inner = outer.centered(msz)?;
                let rs = m.sandwich(&outer, &inner, &mus)?;
                let holds = rs.iter().all(|r| r.holds(r.residual + FLOOR));
                let mut sorted = rs.clone();
                sorted.sort_by(|a, b| a.mu.total_cmp(&b.mu));
                let monotone = sorted.windows(2).all(|w| w[1].mu * w[1].value >= w[0].mu * w[0].value - FLOOR);
                let below_one = sorted.iter().all(|r| r.mu * r.value <= 1.0 + FLOOR);
                Ok((
                    json!({ "results": rs, "mu_value": sorted.iter().map(|r| r.mu * r.value).collect::<Vec<_>>() }),
                    json!({ "monotone": monotone, "inequalities": holds }),
                    Verdict::from_bool(holds && monotone && below_one),
                ))
            }));
        }
    }
    if let Some(h) = cfg.hermite.clone() {
        h.potential.validate()?;
        let nm = h.norm_max;
        jobs.push(job(
            "hermite/weighted_norm",
            json!({ "n_max": nm }),
            move |ctx| {
                let errs: Vec<f64> = (0..=nm)
                    .map(|n| (weighted_norm_sq(n) - weighted_norm_sq_quadrature(n, nm + 8)).abs())
                    .collect();
                let worst = errs.iter().copied().fold(0.0, f64::max);
                let tol = 1e-8 * ctx.tol_scale;
                Ok((
                    json!({ "n0": weighted_norm_sq(0), "max_error": worst }),
                    json!({ "tol": tol }),
                    Verdict::from_bool(worst < tol),
                ))
            },
        ));
        jobs.push(job(
            "hermite/bound_table",
            json!({ "potential": h.potential, "t": h.t, "m": h.m }),
            move |_| {
                let k = weight_constant(&h.potential)?;
                let e = hermite_matrix_elements(&h.potential, h.t, h.m, &HermiteConfig::default())?;
                let v = bound_violations(&e.matrix, h.t, k, e.quad_error);
                let verdict = if e.flagged {
                    Verdict::Flagged
                } else {
                    Verdict::from_bool(v.is_empty())
                };
                Ok((
                    json!({ "k": k, "violations": v, "quad_error": e.quad_error }),
                    json!({ "table": "paper" }),
                    verdict,
                ))
            },
        ));
    }
    Ok(Suite::new(jobs, false).with_series(|records| {
        vec![series_from(
            "ground_energy",
            &["sites", "energy", "gap", "residual"],
            records,
            "ground/",
            |r| {
                Some(vec![
                    r.inputs["sites"].as_f64()?,
                    num(&r.values, "energy")?,
                    num(&r.values, "gap")?,
                    num(&r.values, "residual")?,
                ])
            },
        )]
    }))
}

// ---------------------------------------------------------------- decompose

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomDecompose {
    pub count: usize,
    pub min_dim: usize,
    pub max_dim: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecomposeConfig {
    pub space: SpaceSpec,
    pub x_r: Option<Vec<Vec<Value>>>,
    pub x_t: Option<Vec<Vec<Value>>>,
    pub random: Option<RandomDecompose>,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            space: SpaceSpec::Standard(2),
            x_r: None,
            x_t: None,
            random: None,
        }
    }
}

/// Symplectic basis and regularity decomposition checks on one space.
pub fn decomposition_case(
    space: &ExactSpace,
    x_r: &Subspace<Q>,
    x_t: Option<&Subspace<Q>>,
) -> Result<Outcome> {
    let b = symplectic_basis(space)?;
    let gram = canonical_gram_defect(space, &b);
    let x_t = x_t.cloned().unwrap_or_else(|| radical(space, x_r));
    let d = regularity_decomposition(space, x_r, &x_t)?;
    let ok = verify_decomposition(space, &d);
    Ok((
        json!({
            "gram_defect": gram, "dims": [d.q.dim(), d.reg.dim(), d.sing.dim()], "verified": ok,
            "x_r_dim": x_r.dim(), "x_t_dim": x_t.dim(),
        }),
        json!({ "gram_defect": 0.0 }),
        Verdict::from_bool(gram == 0.0 && ok),
    ))
}

pub fn random_subspace<R: Rng>(rng: &mut R, space: &ExactSpace) -> Result<Subspace<Q>> {
    let d = space.dim();
    let k = rng.gen_range(0..=d);
    let gens: Vec<Vec<Q>> = (0..k)
        .map(|_| (0..d).map(|_| Q::from_i64(rng.gen_range(-2..=2))).collect())
        .collect();
    Subspace::spanned_by(space, &gens)
}

pub fn decompose(cfg: DecomposeConfig) -> Result<Suite> {
    if let Some(r) = cfg.random.clone() {
        if r.min_dim < 2 || r.max_dim < r.min_dim {
            return Err(Error::InvalidArgument("need 2 ≤ min_dim ≤ max_dim".into()));
        }
        let jobs = (0..r.count)
            .map(|i| {
                let r = r.clone();
                job(
                    format!("decompose/{i:03}"),
                    json!({ "case": i }),
                    move |ctx| {
                        let mut rng = ctx.rng(i as u64);
                        let dims: Vec<usize> =
                            (r.min_dim..=r.max_dim).filter(|d| d % 2 == 0).collect();
                        let d = dims[rng.gen_range(0..dims.len())];
                        let space = crate::symplin::random_exact_space(&mut rng, d)?;
                        let x_r = random_subspace(&mut rng, &space)?;
                        decomposition_case(&space, &x_r, None)
                    },
                )
            })
            .collect();
        return Ok(Suite::new(jobs, true));
    }
    let space = cfg.space.build(&mut ChaCha8Rng::seed_from_u64(0))?;
    let x_r = match &cfg.x_r {
        Some(rows) => Subspace::spanned_by(&space, &rational_matrix(rows)?)?,
        None => Subspace::whole(&space),
    };
    let x_t = match &cfg.x_t {
        Some(rows) => Some(Subspace::spanned_by(&space, &rational_matrix(rows)?)?),
        None => None,
    };
    // Inconsistent regularity data is a configuration error.
    decomposition_case(&space, &x_r, x_t.as_ref())?;
    let shared = Arc::new((space, x_r, x_t));
    Ok(Suite::new(
        vec![job(
            "decompose",
            json!({ "x_r": cfg.x_r, "x_t": cfg.x_t }),
            move |_| {
                let (space, x_r, x_t) = &*shared;
                decomposition_case(space, x_r, x_t.as_ref())
            },
        )],
        false,
    ))
}
