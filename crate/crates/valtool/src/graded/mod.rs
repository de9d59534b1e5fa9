//! Associated graded rings along a valuation: presentations, bases of
//! graded pieces, homogeneous subalgebra membership, the alignment detector
//! for extensions, and integral relations between initial forms.

mod align;
mod integral;

pub use align::{fingen_detect, AlignmentState, LevelRecord, MatchedPair, ObstructionKind, Verdict};
pub use integral::{integral_relation, IntegralRelation, RelationTerm};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::Zero;
use thiserror::Error;

use crate::arith::{in_group, ArithError, GroupIndex, ResidueTower, Subfield, TowerElem, Value, ValueGroup};
use crate::genseq::{residue_sum, GenSeq, GenSeqError, GradedElem};
use crate::ring::RingError;

/// Upper bound on enumerated monomials per graded piece.
pub const ENUMERATION_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Error)]
pub enum GradedError {
    #[error(transparent)]
    GenSeq(#[from] GenSeqError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("inconsistent graded data: {0}")]
    Inconsistent(String),
}

/// Key levels whose initial forms are needed as generators: the jump
/// levels, and the top key while its `n` is unknown.
pub fn frontier_levels(g: &GenSeq) -> Vec<usize> {
    let mut l = g.sigma_indices();
    let top = g.top();
    if top > 0 && !l.contains(&top) && g.n(top).is_none() {
        l.push(top);
    }
    l
}

impl GradedElem {
    pub fn one(t: &Arc<ResidueTower>) -> GradedElem {
        GradedElem { value: Value::zero(), terms: vec![(TowerElem::one(t), Vec::new())] }
    }

    pub fn scale(&self, c: &TowerElem) -> GradedElem {
        let terms = self.terms.iter().map(|(k, e)| (k * c, e.clone())).filter(|(k, _)| !k.is_zero()).collect();
        GradedElem { value: self.value.clone(), terms }
    }

    pub fn mul(&self, o: &GradedElem) -> GradedElem {
        let mut acc: BTreeMap<Vec<u32>, TowerElem> = BTreeMap::new();
        for (c, e) in &self.terms {
            for (d, f) in &o.terms {
                let len = e.len().max(f.len());
                let mut x: Vec<u32> = (0..len).map(|k| e.get(k).unwrap_or(&0) + f.get(k).unwrap_or(&0)).collect();
                while x.last() == Some(&0) {
                    x.pop();
                }
                let p = c * d;
                match acc.get_mut(&x) {
                    Some(v) => *v = &*v + &p,
                    None => {
                        acc.insert(x, p);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (c, e)).collect();
        GradedElem { value: &self.value + &o.value, terms }
    }

    pub fn pow(&self, mut e: u32) -> GradedElem {
        let t = self.terms.first().map(|(c, _)| c.tower().clone()).unwrap_or_else(ResidueTower::rational);
        let mut acc = GradedElem::one(&t);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }
}

/// Initial form of a key, `in(P_k)`.
pub fn key_form(g: &GenSeq, k: usize) -> GradedElem {
    let mut e = vec![0; k + 1];
    e[k] = 1;
    GradedElem::monomial(g, e)
}

/// The residue subfield `sub` of another tower, read inside `t`.
pub fn transport(sub: &Subfield, t: &Arc<ResidueTower>) -> Result<Subfield, ArithError> {
    let adjoined = sub.adjoined.iter().map(|a| a.embed(t)).collect::<Result<Vec<_>, _>>()?;
    Ok(Subfield { prefix_levels: sub.prefix_levels, adjoined })
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub key: usize,
    pub name: String,
    pub value: Value,
    pub nbar: GroupIndex,
    pub n: Option<u32>,
    pub alpha: Option<TowerElem>,
}

/// `in(P_i)^{n_i} + Σ c̄·in(M) = 0` over the tail terms of value `n_i·β_i`.
#[derive(Clone, Debug)]
pub struct GradedRelation {
    pub level: usize,
    pub value: Value,
    pub terms: Vec<(TowerElem, Vec<u32>)>,
    /// Whether the residues of the terms sum to zero; `None` when some
    /// residue is not known.
    pub vanishes: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct GradedPresentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<GradedRelation>,
    pub depth: usize,
    names: Vec<String>,
}

impl GradedPresentation {
    pub fn relation_text(&self, r: &GradedRelation) -> String {
        let e = GradedElem { value: r.value.clone(), terms: r.terms.clone() };
        format!("{} = 0", e.render(&self.names))
    }

    /// Every relation is homogeneous and none is known to fail.
    pub fn holds(&self) -> bool {
        self.relations.iter().all(|r| r.vanishes != Some(false))
    }
}

impl fmt::Display for GradedPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graded presentation, depth {}", self.depth)?;
        for g in &self.generators {
            let n = g.n.map(|n| n.to_string()).unwrap_or_else(|| "?".into());
            write!(f, "  in({})  value {}  n̄ {}  n {n}", g.name, g.value, g.nbar)?;
            match &g.alpha {
                Some(a) => writeln!(f, "  α {a}")?,
                None => writeln!(f)?,
            }
        }
        if self.relations.is_empty() {
            writeln!(f, "  no relations")?;
        }
        for r in &self.relations {
            let v = match r.vanishes {
                Some(true) => "vanishes",
                Some(false) => "DOES NOT VANISH",
                None => "residues unknown",
            };
            writeln!(f, "  [{}] {}  (value {}, {v})", r.level, self.relation_text(r), r.value)?;
        }
        Ok(())
    }
}

pub fn graded_presentation(g: &GenSeq, depth: usize) -> Result<GradedPresentation, GradedError> {
    let levels = frontier_levels(g);
    let capped = depth >= levels.len();
    let depth = depth.min(levels.len() - 1);
    let names = g.key_names();
    let generators = levels[..=depth]
        .iter()
        .map(|&k| Generator {
            key: k,
            name: names[k].clone(),
            value: g.beta(k).clone(),
            nbar: g.nbar(k),
            n: g.n(k),
            alpha: g.alpha(k).cloned(),
        })
        .collect();
    let mut relations = Vec::new();
    // Past the last frontier level every remaining relation is in range.
    let last = if capped { depth + 1 } else { depth };
    for &i in levels.iter().take(last).skip(1) {
        if i >= g.top() {
            continue;
        }
        let step = &g.steps()[i - 1];
        let value = g.beta(i).times(step.n as i64);
        let mut lead = vec![0; i + 1];
        lead[i] = step.n;
        let mut terms = vec![(TowerElem::one(g.tower()), lead.clone())];
        for t in &step.tail {
            if g.monomial_value(&t.exps) == value {
                terms.push((t.coeff.embed(g.tower())?, t.exps.clone()));
            }
        }
        let vanishes = residue_sum(g, &terms, &lead).ok().map(|r| r.is_zero());
        relations.push(GradedRelation { level: i, value, terms, vanishes });
    }
    Ok(GradedPresentation { generators, relations, depth, names })
}

/// Exponent vectors `c` with `Σ c_k·values_k = gamma` and `c_k ≤ caps_k`.
/// All values must be positive.
pub(crate) fn enumerate_exponents(
    values: &[Value],
    caps: &[Option<u32>],
    gamma: &Value,
    group: &ValueGroup,
) -> Result<Vec<Vec<u32>>, GradedError> {
    let mut out = Vec::new();
    if values.is_empty() {
        if gamma.is_zero() {
            out.push(Vec::new());
        }
        return Ok(out);
    }
    if group.sign(gamma)?.is_lt() || !in_group(gamma, values) {
        return Ok(out);
    }
    let mut cur = vec![0u32; values.len()];
    enum_rec(values, caps, gamma, group, values.len() - 1, &mut cur, &mut out)?;
    Ok(out)
}

fn max_multiple(v: &Value, rem: &Value, cap: Option<u32>, group: &ValueGroup) -> Result<u32, GradedError> {
    if v.is_rational() && rem.is_rational() {
        let q = (&rem.q0 / &v.q0).floor().to_integer();
        let q = u32::try_from(q.max(num::BigInt::from(0))).unwrap_or(u32::MAX);
        return Ok(cap.map_or(q, |c| q.min(c)));
    }
    let mut a = 0u32;
    while cap.is_none_or(|c| a < c) && group.le(&v.times(a as i64 + 1), rem)? {
        a += 1;
        if a as usize > ENUMERATION_BUDGET {
            return Err(GradedError::Budget("multiplicity bound".into()));
        }
    }
    Ok(a)
}

fn enum_rec(
    values: &[Value],
    caps: &[Option<u32>],
    rem: &Value,
    group: &ValueGroup,
    k: usize,
    cur: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) -> Result<(), GradedError> {
    if k == 0 {
        if let Some(q) = rem.ratio_to(&values[0]) {
            if q.is_integer() && q >= num::zero() {
                let a: u32 = q.to_integer().try_into().map_err(|_| ArithError::IndexOverflow)?;
                if caps[0].is_none_or(|c| a <= c) {
                    cur[0] = a;
                    out.push(cur.clone());
                    if out.len() > ENUMERATION_BUDGET {
                        return Err(GradedError::Budget(format!("more than {ENUMERATION_BUDGET} monomials")));
                    }
                }
            }
        } else if rem.is_zero() {
            cur[0] = 0;
            out.push(cur.clone());
        }
        return Ok(());
    }
    let amax = max_multiple(&values[k], rem, caps[k], group)?;
    for a in 0..=amax {
        let r = rem - &values[k].times(a as i64);
        if !r.is_zero() && !in_group(&r, &values[..k]) {
            continue;
        }
        cur[k] = a;
        enum_rec(values, caps, &r, group, k - 1, cur, out)?;
    }
    cur[k] = 0;
    Ok(())
}

/// Reduced key monomials of value `gamma` over the keys up to the
/// `depth`-th frontier level.
pub fn graded_piece_basis(gamma: &Value, g: &GenSeq, depth: usize) -> Result<Vec<Vec<u32>>, GradedError> {
    let levels = frontier_levels(g);
    let top_key = levels[depth.min(levels.len() - 1)];
    let values: Vec<Value> = g.betas()[..=top_key].to_vec();
    let caps: Vec<Option<u32>> = (0..=top_key)
        .map(|k| match k {
            0 => None,
            _ if !levels.contains(&k) => Some(0),
            _ => g.n(k).map(|n| n - 1),
        })
        .collect();
    let mut out = enumerate_exponents(&values, &caps, gamma, g.group())?;
    out.sort();
    Ok(out)
}

/// Witness for a membership answer.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// `e = Σ c·Π gens^{exps}`.
    Representation(Vec<(TowerElem, Vec<u32>)>),
    /// No representation: `monomials` products of the generators were
    /// formed in this value and span a space of dimension `rank` over the
    /// base field.
    Failure { monomials: usize, rank: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub certificate: Certificate,
}

fn add_exps(a: &[u32], b: &[u32]) -> Vec<u32> {
    (0..a.len().max(b.len())).map(|k| a.get(k).unwrap_or(&0) + b.get(k).unwrap_or(&0)).collect()
}

/// The part of the subalgebra in one value: residues relative to
/// `reference`, with the product each spanning vector came from.
struct Piece {
    reference: Vec<u32>,
    span: crate::arith::Span,
    vectors: Vec<TowerElem>,
    tags: Vec<(Vec<u32>, TowerElem)>,
}

/// Decides whether the homogeneous `e` lies in `coeffs[gens]` inside the
/// graded ring of `g`. Each graded piece is one-dimensional over the
/// residue field of the valuation, so the subalgebra is built value by
/// value as a span of residues over the base field.
pub fn subalgebra_membership(
    e: &GradedElem,
    gens: &[GradedElem],
    g: &GenSeq,
    coeffs: &Subfield,
) -> Result<Membership, GradedError> {
    if e.terms.is_empty() {
        return Ok(Membership { member: true, certificate: Certificate::Representation(Vec::new()) });
    }
    let group = g.group();
    let mut values = Vec::new();
    for x in gens {
        if !group.is_positive(&x.value)? || x.terms.is_empty() {
            return Err(GradedError::Precondition(format!("generator of value {} is not positive", x.value)));
        }
        values.push(x.value.clone());
    }
    let t = g.tower();
    let failure = |rank| Membership { member: false, certificate: Certificate::Failure { monomials: 0, rank } };
    if group.sign(&e.value)?.is_lt() || !in_group(&e.value, &values) {
        return Ok(failure(0));
    }

    let mut seen: HashMap<Value, ()> = HashMap::new();
    let mut stack = vec![e.value.clone()];
    seen.insert(e.value.clone(), ());
    while let Some(v) = stack.pop() {
        for w in &values {
            let r = &v - w;
            if !group.sign(&r)?.is_lt() && !seen.contains_key(&r) {
                if seen.len() > ENUMERATION_BUDGET {
                    return Err(GradedError::Budget(format!("more than {ENUMERATION_BUDGET} values below {}", e.value)));
                }
                seen.insert(r.clone(), ());
                stack.push(r);
            }
        }
    }
    let mut order: Vec<Value> = seen.into_keys().collect();
    let mut cmp_err = None;
    order.sort_by(|a, b| {
        group.cmp(a, b).unwrap_or_else(|err| {
            cmp_err.get_or_insert(err);
            std::cmp::Ordering::Equal
        })
    });
    if let Some(err) = cmp_err {
        return Err(err.into());
    }

    let basis = coeffs.basis(t)?;
    let full = TowerElem::one(t).coords().len();
    let mut pieces: HashMap<Value, Piece> = HashMap::new();
    let mut products = 0;
    for v in &order {
        if v.is_zero() {
            let mut piece = Piece {
                reference: Vec::new(),
                span: crate::arith::Span::new(t.base().clone()),
                vectors: Vec::new(),
                tags: Vec::new(),
            };
            for b in &basis {
                if piece.span.insert(b.coords()).is_some() {
                    piece.vectors.push(b.clone());
                    piece.tags.push((Vec::new(), b.clone()));
                }
            }
            pieces.insert(v.clone(), piece);
            continue;
        }
        let mut piece: Option<Piece> = None;
        for (k, gen) in gens.iter().enumerate() {
            if piece.as_ref().is_some_and(|p| p.span.rank() == full) {
                break;
            }
            let prev_value = v - &gen.value;
            let Some(prev) = pieces.get(&prev_value) else { continue };
            if prev.vectors.is_empty() {
                continue;
            }
            let piece = piece.get_or_insert_with(|| Piece {
                reference: add_exps(&gen.terms[0].1, &prev.reference),
                span: crate::arith::Span::new(t.base().clone()),
                vectors: Vec::new(),
                tags: Vec::new(),
            });
            let shifted: Vec<_> = gen.terms.iter().map(|(c, x)| (c.clone(), add_exps(x, &prev.reference))).collect();
            let factor = residue_sum(g, &shifted, &piece.reference)?;
            for (b, (exps, c0)) in prev.vectors.iter().zip(&prev.tags) {
                for c in &basis {
                    products += 1;
                    let w = &(&factor * b) * c;
                    if piece.span.insert(w.coords()).is_some() {
                        let mut ex = exps.clone();
                        ex.resize(gens.len(), 0);
                        ex[k] += 1;
                        piece.vectors.push(w);
                        piece.tags.push((ex, c0 * c));
                    }
                }
            }
        }
        if let Some(p) = piece {
            pieces.insert(v.clone(), p);
        }
    }
    let Some(top) = pieces.get(&e.value) else { return Ok(failure(0)) };
    let target = residue_sum(g, &e.terms, &top.reference)?;
    match top.span.express(target.coords()) {
        Some(w) => {
            let mut rep: Vec<(TowerElem, Vec<u32>)> = Vec::new();
            for (x, (exps, c)) in w.iter().zip(&top.tags) {
                if x.is_zero() {
                    continue;
                }
                let term = &TowerElem::from_rat(t, x)? * c;
                match rep.iter_mut().find(|(_, ex)| ex == exps) {
                    Some((acc, _)) => *acc = &*acc + &term,
                    None => rep.push((term, exps.clone())),
                }
            }
            rep.retain(|(c, _)| !c.is_zero());
            Ok(Membership { member: true, certificate: Certificate::Representation(rep) })
        }
        None => Ok(Membership {
            member: false,
            certificate: Certificate::Failure { monomials: products, rank: top.span.rank() },
        }),
    }
}

#[cfg(test)]
mod tests;
