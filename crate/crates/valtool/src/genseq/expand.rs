//! Reduced expansions in key monomials, values and initial forms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{GenSeq, GenSeqError};
use crate::arith::{TowerElem, Value};
use crate::ring::{RingElem, RingError};

#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub coeff: TowerElem,
    pub exps: Vec<u32>,
    pub value: Value,
}

/// `f = Σ c·P_0^{a_0}···P_r^{a_r}` with `a_k < n_k` for every key below the top.
#[derive(Clone, Debug, PartialEq)]
pub struct PAdicExpansion {
    pub terms: Vec<ExpTerm>,
}

impl PAdicExpansion {
    pub fn reconstruct(&self, g: &GenSeq) -> RingElem {
        let mut acc = RingElem::zero(g.ctx());
        for t in &self.terms {
            acc = &acc + &g.monomial(&t.exps).scale(&t.coeff);
        }
        acc
    }

    /// Minimal value and the terms attaining it.
    pub fn min_group(&self, g: &GenSeq) -> Result<(Value, Vec<&ExpTerm>), GenSeqError> {
        let mut best: Option<&Value> = None;
        for t in &self.terms {
            match best {
                Some(b) if !g.cmp_values(&t.value, b)?.is_lt() => {}
                _ => best = Some(&t.value),
            }
        }
        let v = best.ok_or_else(|| GenSeqError::Precondition("zero has no value".into()))?.clone();
        Ok((v.clone(), self.terms.iter().filter(|t| t.value == v).collect()))
    }

    /// A term whose top-key exponent reaches `n_r`, or `n_r` is unknown.
    pub fn has_unreduced(&self, g: &GenSeq) -> bool {
        self.terms.iter().any(|t| unreduced(g, &t.exps))
    }
}

fn unreduced(g: &GenSeq, exps: &[u32]) -> bool {
    let r = g.top();
    r > 0 && exps[r] > 0 && g.n(r).is_none_or(|n| exps[r] >= n)
}

fn highest_key(g: &GenSeq, deg: u64, below: usize) -> usize {
    (0..=below).rev().find(|&i| g.key_degree(i) <= deg).unwrap_or(0)
}

pub fn expand(f: &RingElem, g: &GenSeq) -> Result<PAdicExpansion, GenSeqError> {
    if !Arc::ptr_eq(f.ctx(), g.ctx()) {
        return Err(RingError::ContextMismatch(f.ctx().name().into(), g.ctx().name().into()).into());
    }
    let mut out = BTreeMap::new();
    if !f.is_zero() {
        let r = highest_key(g, f.deg_y().unwrap() as u64, g.top());
        expand_rec(g, f, r, vec![0; g.num_keys()], &mut out);
    }
    let terms = out
        .into_iter()
        .map(|(exps, coeff): (Vec<u32>, TowerElem)| ExpTerm { value: g.monomial_value(&exps), coeff, exps })
        .collect();
    Ok(PAdicExpansion { terms })
}

fn expand_rec(g: &GenSeq, f: &RingElem, r: usize, prefix: Vec<u32>, out: &mut BTreeMap<Vec<u32>, TowerElem>) {
    if r <= 1 {
        for (&(i, j), c) in f.terms() {
            let mut e = prefix.clone();
            e[0] += i;
            if g.num_keys() > 1 {
                e[1] += j;
            } else {
                assert_eq!(j, 0, "no key for y");
            }
            out.insert(e, c.clone());
        }
        return;
    }
    let p = g.key(r);
    let mut rem = f.clone();
    let mut j = 0;
    while !rem.is_zero() {
        let (q, r0) = rem.divrem_monic_y(p);
        if !r0.is_zero() {
            let next = highest_key(g, r0.deg_y().unwrap() as u64, r - 1);
            let mut e = prefix.clone();
            e[r] = j;
            expand_rec(g, &r0, next, e, out);
        }
        rem = q;
        j += 1;
    }
}

/// Formal combination of key monomials sharing one value.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElem {
    pub value: Value,
    pub terms: Vec<(TowerElem, Vec<u32>)>,
}

impl GradedElem {
    pub fn monomial(g: &GenSeq, exps: Vec<u32>) -> GradedElem {
        GradedElem {
            value: g.monomial_value(&exps),
            terms: vec![(TowerElem::one(g.ctx().tower()), exps)],
        }
    }

    /// Renders with `in(name)` factors, e.g. `2*in(x)^3`.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (n, (c, e)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("in({})", names[i]) } else { format!("in({})^{k}", names[i]) })
                .collect();
            let mono = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
            let cs = c.to_string();
            let compound = cs[1..].contains(" + ") || cs[1..].contains(" - ");
            let (neg, body) = if !compound && cs.starts_with('-') { (true, cs[1..].to_string()) } else { (false, cs) };
            let term = match body.as_str() {
                "1" => mono,
                _ if compound => format!("({body})*{mono}"),
                _ => format!("{body}*{mono}"),
            };
            match (n, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&term);
        }
        s
    }
}

impl fmt::Display for GradedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.terms.iter().map(|t| t.1.len()).max().unwrap_or(0);
        let names: Vec<String> = (0..width).map(|i| format!("P{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

/// Residue of `Σ c·M` relative to the monomial `reference`.
pub(crate) fn residue_sum(g: &GenSeq, terms: &[(TowerElem, Vec<u32>)], reference: &[u32]) -> Result<TowerElem, GenSeqError> {
    let mut acc = TowerElem::zero(g.tower());
    for (c, e) in terms {
        let len = e.len().max(reference.len());
        let diff: Vec<i64> = (0..len)
            .map(|k| *e.get(k).unwrap_or(&0) as i64 - *reference.get(k).unwrap_or(&0) as i64)
            .collect();
        let r = g.residue_laurent(&diff)?;
        acc = &acc + &(&c.embed(g.tower())? * &r);
    }
    Ok(acc)
}

/// `[a/b]` for homogeneous elements of equal value; `None` when `b` has
/// zero residue or the values differ.
pub(crate) fn form_ratio(g: &GenSeq, a: &GradedElem, b: &GradedElem) -> Result<Option<TowerElem>, GenSeqError> {
    if a.value != b.value || b.terms.is_empty() {
        return Ok(None);
    }
    let reference = &b.terms[0].1;
    let sa = residue_sum(g, &a.terms, reference)?;
    let sb = residue_sum(g, &b.terms, reference)?;
    if sb.is_zero() {
        return Ok(None);
    }
    Ok(Some(sa.div(&sb)?))
}

pub fn initial_form(f: &RingElem, g: &GenSeq) -> Result<GradedElem, GenSeqError> {
    if f.is_zero() {
        return Err(GenSeqError::Precondition("zero has no value".into()));
    }
    let e = expand(f, g)?;
    let (value, group) = e.min_group(g)?;
    let terms: Vec<(TowerElem, Vec<u32>)> = group.iter().map(|t| (t.coeff.clone(), t.exps.clone())).collect();
    if terms.len() > 1 {
        let sum = residue_sum(g, &terms, &terms[0].1)?;
        if sum.is_zero() {
            if group.iter().any(|t| unreduced(g, &t.exps)) {
                return Err(GenSeqError::InsufficientData(format!(
                    "terms of value {value} cancel; a key beyond P_{} is needed",
                    g.top()
                )));
            }
            return Err(GenSeqError::Inconsistent(format!("reduced key monomials of value {value} cancel")));
        }
    }
    Ok(GradedElem { value, terms })
}

pub fn evaluate(f: &RingElem, g: &GenSeq) -> Result<Value, GenSeqError> {
    Ok(initial_form(f, g)?.value)
}

pub fn residue_of_monomial(m: &[i64], g: &GenSeq) -> Result<TowerElem, GenSeqError> {
    g.residue_laurent(m)
}
