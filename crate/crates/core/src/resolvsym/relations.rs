//! Random instances of the defining relations and the derived adjoint identity.

use num_traits::{One, Zero};
use rand::Rng;

use super::poly::{cq, Poly, Q};
use crate::error::Result;
use crate::symplin::{rat, ExactSpace};

#[derive(Debug, Clone)]
pub struct RelationInstance {
    pub name: &'static str,
    pub lhs: Poly,
    pub rhs: Poly,
}

impl RelationInstance {
    pub fn difference(&self) -> Poly {
        self.lhs.sub(&self.rhs)
    }
}

pub const RELATION_NAMES: [&str; 7] = [
    "zero_field",
    "adjoint",
    "scaling",
    "resolvent_identity",
    "commutator",
    "sum",
    "adjoint_product",
];

fn real(x: Q) -> super::poly::CQ {
    cq(x, Q::zero())
}

fn random_param<R: Rng>(rng: &mut R) -> Q {
    const CHOICES: [(i64, i64); 8] = [
        (1, 1),
        (2, 1),
        (3, 1),
        (1, 2),
        (3, 2),
        (5, 2),
        (1, 3),
        (4, 3),
    ];
    let (n, d) = CHOICES[rng.gen_range(0..CHOICES.len())];
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(sign * n, d)
}

fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<Q> {
    loop {
        let v: Vec<Q> = (0..dim).map(|_| rat(rng.gen_range(-2..=2), 1)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// One instance of each relation with random λ, μ, ν, f, g:
///
/// * R(λ,0) = −(i/λ)𝟙
/// * R(λ,f)* = R(−λ,f)
/// * νR(νλ,νf) = R(λ,f)
/// * R(λ,f) − R(μ,f) = i(μ−λ)R(λ,f)R(μ,f)
/// * [R(λ,f), R(μ,g)] = iσ(f,g)R(λ,f)R(μ,g)²R(λ,f)
/// * R(λ,f)R(μ,g) = R(λ+μ,f+g)[R(λ,f) + R(μ,g) + iσ(f,g)R(λ,f)²R(μ,g)], λ+μ ≠ 0
/// * R(λ,f) − R(λ,f)* = −2iλR(λ,f)R(λ,f)*
pub fn relation_instances<R: Rng>(
    space: &ExactSpace,
    rng: &mut R,
) -> Result<Vec<RelationInstance>> {
    let d = space.dim();
    let lam = random_param(rng);
    let mut mu = random_param(rng);
    while (lam.clone() + mu.clone()).is_zero() {
        mu = random_param(rng);
    }
    let nu = random_param(rng);
    let f = random_vector(rng, d);
    let g = random_vector(rng, d);
    let i = cq(Q::zero(), Q::one());
    let r = |z: &Q, v: &[Q]| Poly::resolvent(real(z.clone()), v.to_vec());

    let mut out = Vec::with_capacity(7);
    out.push(RelationInstance {
        name: RELATION_NAMES[0],
        lhs: r(&lam, &vec![Q::zero(); d])?,
        rhs: Poly::scalar(cq(Q::zero(), -Q::one() / lam.clone())),
    });

    let rf = r(&lam, &f)?;
    out.push(RelationInstance {
        name: RELATION_NAMES[1],
        lhs: rf.adjoint(),
        rhs: r(&-lam.clone(), &f)?,
    });

    let scaled_f: Vec<Q> = f.iter().map(|x| x.clone() * nu.clone()).collect();
    out.push(RelationInstance {
        name: RELATION_NAMES[2],
        lhs: r(&(nu.clone() * lam.clone()), &scaled_f)?.scale(&real(nu.clone())),
        rhs: rf.clone(),
    });

    let rmf = r(&mu, &f)?;
    out.push(RelationInstance {
        name: RELATION_NAMES[3],
        lhs: rf.sub(&rmf),
        rhs: rf
            .mul(&rmf)
            .scale(&(i.clone() * real(mu.clone() - lam.clone()))),
    });

    let rg = r(&mu, &g)?;
    let sigma = space.sigma(&f, &g)?;
    let i_sigma = cq(Q::zero(), sigma);
    out.push(RelationInstance {
        name: RELATION_NAMES[4],
        lhs: rf.mul(&rg).sub(&rg.mul(&rf)),
        rhs: rf.mul(&rg).mul(&rg).mul(&rf).scale(&i_sigma),
    });

    let fg: Vec<Q> = f
        .iter()
        .zip(&g)
        .map(|(a, b)| a.clone() + b.clone())
        .collect();
    let h = r(&(lam.clone() + mu.clone()), &fg)?;
    out.push(RelationInstance {
        name: RELATION_NAMES[5],
        lhs: rf.mul(&rg),
        rhs: h.mul(&rf.add(&rg).add(&rf.mul(&rf).mul(&rg).scale(&i_sigma))),
    });

    let adj = rf.adjoint();
    out.push(RelationInstance {
        name: RELATION_NAMES[6],
        lhs: rf.sub(&adj),
        rhs: rf.mul(&adj).scale(&cq(Q::zero(), -lam.clone() * rat(2, 1))),
    });
    Ok(out)
}
