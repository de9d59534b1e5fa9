//! Monic relations over the graded ring of R satisfied by initial forms of
//! elements of S, in rational rank one.

use std::fmt;

use num::{Integer, Signed, ToPrimitive, Zero};

use super::{transport, GradedError};
use crate::arith::{minimal_polynomial_over, Rat, TowerElem, Value};
use crate::extension::ExtensionMap;
use crate::genseq::{initial_form, residue_sum, GenSeq};
use crate::ring::{LocalRingCtx, RingElem};

/// `coeff·in(x)^{x_power}·in(f)^{f_power}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationTerm {
    pub coeff: TowerElem,
    pub x_power: u64,
    pub f_power: u64,
}

#[derive(Clone, Debug)]
pub struct IntegralRelation {
    pub value: Value,
    pub n1: u64,
    pub a: u64,
    pub b: u64,
    pub omega: Value,
    /// `[f^{b·n1} / x^a]`.
    pub xi: TowerElem,
    /// Monic, low-to-high.
    pub minpoly: Vec<TowerElem>,
    pub terms: Vec<RelationTerm>,
    pub vanishes: bool,
    x_name: String,
}

impl IntegralRelation {
    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }
}

fn power(name: &str, k: u64) -> String {
    match k {
        1 => format!("in({name})"),
        _ => format!("in({name})^{k}"),
    }
}

impl fmt::Display for IntegralRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in self.terms.iter().enumerate() {
            let mut parts = Vec::new();
            if t.x_power > 0 {
                parts.push(power(&self.x_name, t.x_power));
            }
            if t.f_power > 0 {
                parts.push(power("f", t.f_power));
            }
            let mono = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
            let c = t.coeff.to_string();
            let (neg, body) = match c.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ => (false, c),
            };
            let sign = match (n, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            if body == "1" {
                write!(f, "{sign}{mono}")?;
            } else if body.contains(' ') {
                write!(f, "{sign}({body})*{mono}")?;
            } else {
                write!(f, "{sign}{body}*{mono}")?;
            }
        }
        write!(f, " = 0")
    }
}

fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    let l = a.denom().lcm(b.denom());
    let x = (a * Rat::from_integer(l.clone())).to_integer();
    let y = (b * Rat::from_integer(l.clone())).to_integer();
    Rat::new(x.gcd(&y), l)
}

fn small(r: &Rat, what: &str) -> Result<u64, GradedError> {
    r.to_integer().to_u64().ok_or_else(|| GradedError::Precondition(format!("{what} does not fit in 64 bits")))
}

fn laurent(parts: &[(i64, &[u32])]) -> Vec<i64> {
    let len = parts.iter().map(|p| p.1.len()).max().unwrap_or(0);
    (0..len).map(|k| parts.iter().map(|(m, e)| m * *e.get(k).unwrap_or(&0) as i64).sum()).collect()
}

/// Builds the monic relation satisfied by `in(f)` over the graded ring of
/// R, from the minimal polynomial of `[f^{b·n1}/x^a]`.
pub fn integral_relation(
    f: &RingElem,
    g_r: &GenSeq,
    g_s: &GenSeq,
    ext: &ExtensionMap,
) -> Result<IntegralRelation, GradedError> {
    if !LocalRingCtx::same(f.ctx(), g_s.ctx()) || !LocalRingCtx::same(ext.source(), g_r.ctx()) {
        return Err(GradedError::Precondition("element and sequences live in different rings".into()));
    }
    if f.is_zero() || f.is_unit() {
        return Err(GradedError::Precondition(format!("{f} is zero or a unit; its value is not positive")));
    }
    let in_f = initial_form(f, g_s)?;
    let gamma = in_f.value.clone();
    if !gamma.is_rational() || g_r.betas().iter().any(|b| !b.is_rational()) {
        return Err(GradedError::Precondition("rational rank one is required".into()));
    }
    let mut g0 = Rat::zero();
    for b in g_r.betas() {
        g0 = if g0.is_zero() { b.q0.clone() } else { rat_gcd(&g0, &b.q0) };
    }
    let n1 = (&gamma.q0 / &g0).denom().clone();
    let omega = g_r.beta(0).clone();
    let q = &gamma.q0 * Rat::from_integer(n1.clone()) / &omega.q0;
    let (a, b) = (q.numer().abs(), q.denom().clone());
    let n1 = small(&Rat::from_integer(n1), "n1")?;
    let a = small(&Rat::from_integer(a), "a")?;
    let b = small(&Rat::from_integer(b), "b")?;

    let in_u = initial_form(&ext.image(g_r.key(0))?, g_s)?;
    if in_u.value != omega {
        return Err(GradedError::Inconsistent(format!(
            "image of {} has value {}, not {omega}",
            g_r.key_name(0),
            in_u.value
        )));
    }
    let mf = in_f.terms[0].1.clone();
    let mu = in_u.terms[0].1.clone();
    let rf = residue_sum(g_s, &in_f.terms, &mf)?;
    let ru = residue_sum(g_s, &in_u.terms, &mu)?;
    let bn = (b * n1) as i64;
    let xi = &(&rf.pow(bn)? * &ru.pow(-(a as i64))?) * &g_s.residue_laurent(&laurent(&[(bn, &mf), (-(a as i64), &mu)]))?;
    let k_r = transport(g_r.ctx().residue(), g_s.tower())?;
    let minpoly = minimal_polynomial_over(&xi, &k_r)?;
    let r = minpoly.len() as i64 - 1;

    let mut terms = Vec::new();
    let mut check = TowerElem::zero(g_s.tower());
    for i in (0..=r).rev() {
        let c = &minpoly[i as usize];
        if c.is_zero() {
            continue;
        }
        let xp = a as i64 * (r - i);
        let fp = bn * i;
        let shift = g_s.residue_laurent(&laurent(&[(fp, &mf), (xp - a as i64 * r, &mu)]))?;
        check = &check + &(&(c * &rf.pow(fp)?) * &(&ru.pow(xp)? * &shift));
        terms.push(RelationTerm { coeff: c.clone(), x_power: xp as u64, f_power: fp as u64 });
    }
    Ok(IntegralRelation {
        value: gamma,
        n1,
        a,
        b,
        omega,
        xi,
        minpoly,
        terms,
        vanishes: check.is_zero(),
        x_name: g_r.key_name(0),
    })
}
