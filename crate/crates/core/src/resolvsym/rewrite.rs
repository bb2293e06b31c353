//! Directed rewriting of resolvent polynomials.
//!
//! Core rules (terminating: each lowers the degree or the number of inversions):
//! * resolvent identity on adjacent factors with equal f and distinct z,
//! * swapping adjacent σ-commuting factors into canonical order,
//! * R_a R_b² R_a → (R_a R_b − R_b R_a) / (iσ(a,b)) when σ(a,b) ≠ 0.
//!
//! Beyond the core rules a bounded best-first search applies the sum relation
//! R(λ,f)R(μ,g) = R(λ+μ,f+g)[R(λ,f) + R(μ,g) + iσ(f,g)R(λ,f)²R(μ,g)],
//! rescaled so that f+g can hit directions already present in the polynomial.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num_traits::{One, Zero};

use super::poly::{cq, Generator, Poly, CQ, Q};
use crate::error::Result;
use crate::symplin::SymplecticSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Contract,
    Commute,
    Ccr,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationStatus {
    /// No rule or search move applies within the caps.
    Normalized,
    /// The step budget ran out; the returned form may not be fully normalized.
    BudgetExhausted,
    /// Moves were discarded because they exceeded the degree cap.
    DegreeCapped,
}

impl NormalizationStatus {
    pub fn is_complete(self) -> bool {
        self == NormalizationStatus::Normalized
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub rule: Rule,
    pub before: Poly,
    pub after: Poly,
}

#[derive(Debug, Clone)]
pub struct SimplifyOptions {
    /// Maximum number of search moves.
    pub budget: usize,
    pub degree_cap: usize,
    pub trace: bool,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions {
            budget: 400,
            degree_cap: 12,
            trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Simplified {
    pub poly: Poly,
    pub status: NormalizationStatus,
    pub steps: usize,
    pub trace: Vec<TraceStep>,
}

type Expansion = Vec<(CQ, Vec<Generator>)>;

fn i_over(x: CQ) -> CQ {
    // 1 / (i x)
    let ix = cq(Q::zero(), Q::one()) * x;
    cq(Q::one(), Q::zero()) / ix
}

fn find_core_rule(fs: &[Generator], space: &SymplecticSpace<Q>) -> Option<(Rule, Expansion)> {
    let n = fs.len();
    for i in 0..n.saturating_sub(1) {
        let (a, b) = (&fs[i], &fs[i + 1]);
        if a.f == b.f {
            if a.re == b.re && a.im == b.im {
                continue;
            }
            // R(z)R(w) = (R(z) − R(w)) / (i(w − z))
            let k = i_over(b.z() - a.z());
            let mut keep_a = fs.to_vec();
            keep_a.remove(i + 1);
            let mut keep_b = fs.to_vec();
            keep_b.remove(i);
            return Some((Rule::Contract, vec![(k.clone(), keep_a), (-k, keep_b)]));
        }
        let s = space.sigma_unchecked(&a.f, &b.f);
        if s.is_zero() {
            if b < a {
                let mut sw = fs.to_vec();
                sw.swap(i, i + 1);
                return Some((Rule::Commute, vec![(cq(Q::one(), Q::zero()), sw)]));
            }
            continue;
        }
        if i + 3 < n && fs[i + 2] == *b && fs[i + 3] == *a {
            let k = i_over(cq(s, Q::zero()));
            let mut ab = fs[..i].to_vec();
            ab.push(a.clone());
            ab.push(b.clone());
            ab.extend_from_slice(&fs[i + 4..]);
            let mut ba = fs[..i].to_vec();
            ba.push(b.clone());
            ba.push(a.clone());
            ba.extend_from_slice(&fs[i + 4..]);
            return Some((Rule::Ccr, vec![(k.clone(), ab), (-k, ba)]));
        }
    }
    None
}

/// Applies the core rules until none applies.
pub fn core_normalize(
    p: &Poly,
    space: &SymplecticSpace<Q>,
    mut trace: Option<&mut Vec<TraceStep>>,
) -> Poly {
    let mut cur = p.clone();
    loop {
        let mut found = None;
        for (fs, c) in cur.terms() {
            if let Some((rule, exp)) = find_core_rule(fs, space) {
                found = Some((fs.clone(), c.clone(), rule, exp));
                break;
            }
        }
        let Some((fs, c, rule, exp)) = found else {
            return cur;
        };
        let before = trace.as_ref().map(|_| cur.clone());
        cur.remove_term(&fs);
        for (k, nfs) in exp {
            cur.add_term(c.clone() * k, nfs);
        }
        if let (Some(t), Some(before)) = (trace.as_deref_mut(), before) {
            t.push(TraceStep {
                rule,
                before,
                after: cur.clone(),
            });
        }
    }
}

/// Search move: the sum relation on the adjacent pair at `pos` of `term`,
/// after rescaling the factors by (alpha, beta).
#[derive(Debug, Clone)]
struct Move {
    term: Vec<Generator>,
    pos: usize,
    alpha: Q,
    beta: Q,
}

/// Solves h = αf + βg exactly; None if h is outside span(f, g).
fn decompose2(f: &[Q], g: &[Q], h: &[Q]) -> Option<(Q, Q)> {
    let d = f.len();
    for i in 0..d {
        for j in i + 1..d {
            let det = &f[i] * &g[j] - &f[j] * &g[i];
            if det.is_zero() {
                continue;
            }
            let alpha = (&h[i] * &g[j] - &h[j] * &g[i]) / &det;
            let beta = (&f[i] * &h[j] - &f[j] * &h[i]) / &det;
            let ok = (0..d).all(|k| &alpha * &f[k] + &beta * &g[k] == h[k]);
            return if ok { Some((alpha, beta)) } else { None };
        }
    }
    None
}

fn moves_for(p: &Poly) -> Vec<Move> {
    let mut dirs: Vec<Vec<Q>> = p
        .terms()
        .flat_map(|(fs, _)| fs.iter().map(|g| g.f.clone()))
        .collect();
    dirs.sort();
    dirs.dedup();
    let mut out = Vec::new();
    for (fs, _) in p.terms() {
        for pos in 0..fs.len().saturating_sub(1) {
            let (a, b) = (&fs[pos], &fs[pos + 1]);
            if a.f == b.f {
                continue;
            }
            let mut scalings: Vec<(Q, Q)> = vec![(Q::one(), Q::one())];
            for h in &dirs {
                if *h == a.f || *h == b.f {
                    continue;
                }
                if let Some((al, be)) = decompose2(&a.f, &b.f, h) {
                    if al.is_zero() || be.is_zero() {
                        continue;
                    }
                    let ratio = &be / &al;
                    if !scalings.iter().any(|(x, y)| y / x == ratio) {
                        scalings.push((al, be));
                    }
                }
            }
            for (alpha, beta) in scalings {
                let zr = &alpha * &a.re + &beta * &b.re;
                if zr.is_zero() {
                    continue;
                }
                out.push(Move {
                    term: fs.clone(),
                    pos,
                    alpha,
                    beta,
                });
            }
        }
    }
    out
}

fn apply_move(p: &Poly, mv: &Move, space: &SymplecticSpace<Q>) -> Result<Poly> {
    let mut out = p.clone();
    let Some(c) = out.remove_term(&mv.term) else {
        return Ok(out);
    };
    let (a, b) = (&mv.term[mv.pos], &mv.term[mv.pos + 1]);
    let scale_gen = |g: &Generator, s: &Q| -> (CQ, Vec<Q>) {
        (
            cq(&g.re * s, &g.im * s),
            g.f.iter().map(|x| x * s).collect(),
        )
    };
    let ra = scale_gen(a, &mv.alpha);
    let rb = scale_gen(b, &mv.beta);
    let h = (
        ra.0.clone() + rb.0.clone(),
        ra.1.iter()
            .zip(&rb.1)
            .map(|(x, y)| x + y)
            .collect::<Vec<Q>>(),
    );
    let sigma = space.sigma_unchecked(&ra.1, &rb.1);
    let prefix: Vec<(CQ, Vec<Q>)> = mv.term[..mv.pos]
        .iter()
        .map(|g| (g.z(), g.f.clone()))
        .collect();
    let suffix: Vec<(CQ, Vec<Q>)> = mv.term[mv.pos + 2..]
        .iter()
        .map(|g| (g.z(), g.f.clone()))
        .collect();
    let lead = c * cq(&mv.alpha * &mv.beta, Q::zero());
    let bodies: Vec<(CQ, Vec<(CQ, Vec<Q>)>)> = vec![
        (cq(Q::one(), Q::zero()), vec![h.clone(), ra.clone()]),
        (cq(Q::one(), Q::zero()), vec![h.clone(), rb.clone()]),
        (cq(Q::zero(), sigma), vec![h, ra.clone(), ra, rb]),
    ];
    for (k, mid) in bodies {
        if k.is_zero() {
            continue;
        }
        let mut raw = prefix.clone();
        raw.extend(mid);
        raw.extend(suffix.iter().cloned());
        out = out.add(&Poly::monomial(lead.clone() * k, raw)?);
    }
    Ok(out)
}

fn cost(p: &Poly) -> (usize, usize) {
    (p.len(), p.total_degree())
}

/// Simplifies `p` under the defining relations; see the module docs.
pub fn simplify(
    p: &Poly,
    space: &SymplecticSpace<Q>,
    opts: &SimplifyOptions,
) -> Result<Simplified> {
    p.check_dim(space.dim())?;
    let start = core_normalize(p, space, None);
    let mut nodes: Vec<(Poly, Option<(usize, Move)>)> = vec![(start.clone(), None)];
    let mut seen: HashSet<Poly> = HashSet::new();
    seen.insert(start.clone());
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((cost(&start), 0usize)));
    let mut best = 0usize;
    let mut steps = 0usize;
    let mut capped = p.degree() > opts.degree_cap;
    let mut exhausted = false;
    let mut found_zero = start.is_zero();
    'search: while let Some(Reverse((_, id))) = heap.pop() {
        if found_zero {
            break;
        }
        let current = nodes[id].0.clone();
        for mv in moves_for(&current) {
            if steps >= opts.budget {
                exhausted = true;
                break 'search;
            }
            steps += 1;
            let next = core_normalize(&apply_move(&current, &mv, space)?, space, None);
            if next.degree() > opts.degree_cap {
                capped = true;
                continue;
            }
            if !seen.insert(next.clone()) {
                continue;
            }
            let nid = nodes.len();
            let c = cost(&next);
            nodes.push((next, Some((id, mv))));
            if c < cost(&nodes[best].0) {
                best = nid;
            }
            if nodes[nid].0.is_zero() {
                found_zero = true;
                best = nid;
                break 'search;
            }
            heap.push(Reverse((c, nid)));
        }
    }
    let status = if found_zero {
        NormalizationStatus::Normalized
    } else if exhausted {
        NormalizationStatus::BudgetExhausted
    } else if capped {
        NormalizationStatus::DegreeCapped
    } else {
        NormalizationStatus::Normalized
    };
    let mut trace = Vec::new();
    if opts.trace {
        let mut path = Vec::new();
        let mut at = best;
        while let Some((parent, mv)) = nodes[at].1.clone() {
            path.push(mv);
            at = parent;
        }
        path.reverse();
        let mut cur = core_normalize(p, space, Some(&mut trace));
        for mv in path {
            let next = apply_move(&cur, &mv, space)?;
            trace.push(TraceStep {
                rule: Rule::Sum,
                before: cur,
                after: next.clone(),
            });
            cur = core_normalize(&next, space, Some(&mut trace));
        }
    }
    Ok(Simplified {
        poly: nodes[best].0.clone(),
        status,
        steps,
        trace,
    })
}
