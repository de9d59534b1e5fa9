//! Checks of the recursion data of a generating sequence.

use std::fmt;

use super::{GenSeq, GenSeqError, TopResidueSource};
use crate::arith::{degree_over, GroupIndex, Irreducibility, Value};
use crate::ring::{OracleValue, RingElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub level: Option<usize>,
    pub name: &'static str,
    pub outcome: CheckOutcome,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != CheckOutcome::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.outcome == CheckOutcome::Fail)
    }

    pub fn find(&self, level: Option<usize>, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.level == level && c.name == name)
    }

    fn push(&mut self, level: Option<usize>, name: &'static str, ok: bool, detail: impl Into<String>) {
        let outcome = if ok { CheckOutcome::Pass } else { CheckOutcome::Fail };
        self.checks.push(Check { level, name, outcome, detail: detail.into() });
    }

    fn skip(&mut self, level: Option<usize>, name: &'static str, detail: impl Into<String>) {
        self.checks.push(Check { level, name, outcome: CheckOutcome::Skipped, detail: detail.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.outcome {
                CheckOutcome::Pass => "pass",
                CheckOutcome::Fail => "FAIL",
                CheckOutcome::Skipped => "skip",
            };
            let lv = c.level.map(|l| format!("[{l}] ")).unwrap_or_default();
            writeln!(f, "{tag:4} {lv}{}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

pub fn validate_sequence(g: &GenSeq) -> Result<ValidationReport, GenSeqError> {
    let mut rep = ValidationReport::default();
    let grp = g.group();
    for (i, b) in g.betas().iter().enumerate() {
        let pos = grp.is_positive(b)?;
        rep.push(Some(i), "positive value", pos, format!("β_{i} = {b}"));
    }
    for (lv, msg) in g.issues() {
        rep.push(*lv, "derivation", false, msg.clone());
    }
    let r = g.top();
    for i in 1..r {
        check_step(g, i, &mut rep)?;
    }
    check_top(g, &mut rep)?;
    if g.oracle().is_some() {
        for i in 0..=r {
            check_oracle_value(g, i, &mut rep)?;
        }
    }
    Ok(rep)
}

fn check_step(g: &GenSeq, i: usize, rep: &mut ValidationReport) -> Result<(), GenSeqError> {
    let step = &g.steps()[i - 1];
    let n = step.n;
    let lv = Some(i);
    let target = g.beta(i).times(n as i64);
    let mut bounds = Vec::new();
    let mut values = Vec::new();
    let mut coeffs = Vec::new();
    for (k, t) in step.tail.iter().enumerate() {
        for s in 1..=i {
            let ns = if s == i { Some(n) } else { g.n(s) };
            if ns.is_some_and(|ns| t.exps[s] >= ns) {
                bounds.push(format!("term {k}: σ_{i},{s} = {} ≥ n_{s}", t.exps[s]));
            }
        }
        let v = g.monomial_value(&t.exps);
        if v != target {
            values.push(format!("term {k} has value {v}, expected {target}"));
        }
        if !g.ctx().residue().contains(&t.coeff.embed(g.ctx().tower())?)? {
            coeffs.push(format!("term {k}: {} lies outside R/m_R", t.coeff));
        }
    }
    rep.push(lv, "tail exponent bounds", bounds.is_empty(), joined(&bounds, "all σ below n"));
    rep.push(lv, "tail value", values.is_empty(), joined(&values, &format!("every tail monomial has value {target}")));
    rep.push(lv, "tail coefficients", coeffs.is_empty(), joined(&coeffs, "residues in R/m_R"));
    let inc = g.group().lt(&target, g.beta(i + 1))?;
    rep.push(
        lv,
        "value increase",
        inc,
        format!("β_{} = {} {} n_{i}β_{i} = {target}", i + 1, g.beta(i + 1), if inc { ">" } else { "≯" }),
    );
    let nbar = g.nbar(i);
    match nbar {
        GroupIndex::Finite(nb) => {
            let bad: Vec<String> = step
                .tail
                .iter()
                .enumerate()
                .filter(|(_, t)| !(t.exps[i] as u64).is_multiple_of(nb))
                .map(|(k, t)| format!("term {k}: σ_{i},{i} = {}", t.exps[i]))
                .collect();
            rep.push(lv, "n̄ divides σ", bad.is_empty(), joined(&bad, &format!("n̄_{i} = {nb}")));
            let div = (n as u64).is_multiple_of(nb);
            rep.push(lv, "n = n̄·d", div, format!("n_{i} = {n}, n̄_{i} = {nb}, d_{i} = {}", show(g.d(i))));
        }
        GroupIndex::Infinite => {
            rep.push(lv, "n̄ finite", false, format!("n̄_{i} is infinite below the last key"));
        }
    }
    match g.u_exps(i) {
        Some(u) => rep.push(lv, "U exponents", true, format!("U_{i} = {}", g.monomial_name(u))),
        None => rep.push(lv, "U exponents", false, format!("no reduced U_{i}")),
    }
    check_alpha(g, i, rep)?;
    Ok(())
}

fn check_alpha(g: &GenSeq, i: usize, rep: &mut ValidationReport) -> Result<(), GenSeqError> {
    let lv = Some(i);
    let info = g.info(i);
    let (Some(a), Some(f), Some(d)) = (&info.alpha, &info.minpoly, info.d) else {
        rep.skip(lv, "minimal polynomial", format!("α_{i} could not be derived"));
        return Ok(());
    };
    let root = a.eval_poly(f).is_zero();
    let deg = degree_over(a, &g.residue_through(i - 1))?;
    let assumed =
        g.tower().levels()[..a.level_support()].iter().any(|l| l.irreducibility == Irreducibility::Assumed);
    let ok = root && deg == d as usize;
    let mut detail = format!("α_{i} = {a}, f_{i}(α_{i}) {} 0, degree {deg} vs d_{i} = {d}", if root { "=" } else { "≠" });
    if assumed {
        detail.push_str(" (irreducibility assumed)");
    }
    rep.push(lv, "minimal polynomial", ok, detail);
    if g.oracle().is_some() {
        match g.has_oracle_alpha(i)? {
            Some(o) => match (o.embed(g.tower()), d) {
                (Ok(o), 1) => rep.push(lv, "oracle residue", o == *a, format!("oracle α_{i} = {o}, derived {a}")),
                (Ok(o), _) => {
                    let z = o.eval_poly(f).is_zero();
                    rep.push(lv, "oracle residue", z, format!("f_{i} at oracle residue {o} {}", if z { "vanishes" } else { "is nonzero" }))
                }
                (Err(_), _) => rep.skip(lv, "oracle residue", "oracle residue lives in an unrelated tower"),
            },
            None => rep.skip(lv, "oracle residue", "oracle could not separate leading terms"),
        }
    }
    Ok(())
}

fn check_top(g: &GenSeq, rep: &mut ValidationReport) -> Result<(), GenSeqError> {
    let r = g.top();
    let lv = Some(r);
    if r == 0 {
        return Ok(());
    }
    match g.nbar(r) {
        GroupIndex::Infinite => {
            rep.push(lv, "top residue", true, format!("n̄_{r} infinite, α_{r} = 1 by convention"));
        }
        GroupIndex::Finite(nb) => {
            match g.u_exps(r) {
                Some(u) => rep.push(lv, "U exponents", true, format!("U_{r} = {}", g.monomial_name(u))),
                None => rep.push(lv, "U exponents", false, format!("no reduced U_{r}")),
            }
            match (g.alpha(r), g.top_source()) {
                (Some(a), src) => {
                    let how = match src {
                        TopResidueSource::Oracle => "from oracle",
                        TopResidueSource::Declared => "declared",
                        _ => "derived",
                    };
                    rep.push(
                        lv,
                        "top residue",
                        true,
                        format!("α_{r} = {a} ({how}), n̄_{r} = {nb}, d_{r} = {}, n_{r} = {}", show(g.d(r)), show(g.n(r))),
                    );
                    if *src == TopResidueSource::Declared && g.oracle().is_some() {
                        if let Some(o) = g.has_oracle_alpha(r)? {
                            let same = o.embed(g.tower()).is_ok_and(|o| o == *a);
                            rep.push(lv, "oracle residue", same, format!("oracle α_{r} = {o}, declared {a}"));
                        }
                    }
                }
                (None, _) => rep.skip(lv, "top residue", format!("α_{r} unknown; ties at the top key cannot be resolved")),
            }
        }
    }
    if g.is_terminated() {
        let ok = g.nbar(r).is_infinite();
        rep.push(lv, "termination", ok, if ok { "n̄ infinite at the last key".to_string() } else { format!("n̄_{r} finite") });
    }
    Ok(())
}

fn check_oracle_value(g: &GenSeq, i: usize, rep: &mut ValidationReport) -> Result<(), GenSeqError> {
    let o = g.oracle().unwrap();
    let lv = Some(i);
    let key = g.key(i);
    match o.oracle_value(key)? {
        OracleValue::Exact(v) => {
            rep.push(lv, "oracle value", v == *g.beta(i), format!("oracle ν(P_{i}) = {v}, assigned {}", g.beta(i)))
        }
        OracleValue::AtLeast(v) => {
            let ok = g.group().le(&v, g.beta(i))?;
            if ok {
                rep.skip(lv, "oracle value", format!("oracle only bounds ν(P_{i}) ≥ {v}"));
            } else {
                rep.push(lv, "oracle value", false, format!("oracle ν(P_{i}) ≥ {v} > assigned {}", g.beta(i)));
            }
        }
        OracleValue::Undecided(m) => rep.skip(lv, "oracle value", m),
    }
    Ok(())
}

fn joined(items: &[String], ok: &str) -> String {
    if items.is_empty() {
        ok.to_string()
    } else {
        items.join("; ")
    }
}

fn show(x: Option<u32>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "?".into())
}

impl GenSeq {
    /// Conventional display name of key `P_i`.
    pub fn key_name(&self, i: usize) -> String {
        match i {
            0 | 1 => self.ctx().params()[i].to_string(),
            _ => format!("P{i}"),
        }
    }

    pub fn key_names(&self) -> Vec<String> {
        (0..self.num_keys()).map(|i| self.key_name(i)).collect()
    }

    /// `x^2*y` style name of a key monomial.
    pub fn monomial_name(&self, exps: &[u32]) -> String {
        let parts: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { self.key_name(i) } else { format!("{}^{e}", self.key_name(i)) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Value of `f` according to the attached oracle, when decided.
    pub fn oracle_value_of(&self, f: &RingElem) -> Result<Option<Value>, GenSeqError> {
        let Some(o) = self.oracle() else { return Ok(None) };
        Ok(o.oracle_value(f)?.exact().cloned())
    }
}
