//! Free quadratic transforms along a valuation: the monomial substitution,
//! strict transforms, and the generating sequence carried to the new ring.

mod chain;

pub use chain::{iterate_transforms, ChainStep, ShiftRow, TransformChainRecord};

use std::sync::Arc;

use thiserror::Error;

use crate::arith::{int, rat, ArithError, GroupIndex, TowerElem, Value};
use crate::genseq::{evaluate, GenSeq, GenSeqError, GenSeqSpec, KeyStep, TailTerm};
use crate::ring::{LaurentPoly, LocalRingCtx, OracleValue, RingElem, RingError, ValuationOracle};

#[derive(Debug, Clone, Error)]
pub enum BlowupError {
    #[error(transparent)]
    GenSeq(#[from] GenSeqError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("insufficient keys: {0}")]
    InsufficientKeys(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent transform: {0}")]
    Inconsistent(String),
}

/// `x = x₁^n̄·y₁^a`, `y = x₁^w·y₁^b` with `n̄·b − w·a = ε`, followed by the
/// translation `y₁ = z₁ + c` where `c = α_1^ε`.
#[derive(Clone, Debug)]
pub struct TransformMap {
    pub a: u32,
    pub b: u32,
    pub eps: i32,
    pub w: u32,
    pub nbar: u32,
    /// Residue of `y₁`.
    pub center: TowerElem,
    source: Arc<LocalRingCtx>,
    chart: Arc<LocalRingCtx>,
    target: Arc<LocalRingCtx>,
    key_x1: Vec<u64>,
    rho: Vec<TowerElem>,
}

impl TransformMap {
    pub fn source(&self) -> &Arc<LocalRingCtx> {
        &self.source
    }

    /// Coordinates `(x₁, y₁)` before recentering.
    pub fn chart(&self) -> &Arc<LocalRingCtx> {
        &self.chart
    }

    /// Regular parameters `(x₁, z₁)` of the new ring.
    pub fn target(&self) -> &Arc<LocalRingCtx> {
        &self.target
    }

    /// Exponents of `x` and `y` in `x₁` and `y₁`.
    pub fn forward(&self) -> [(i64, i64); 2] {
        let (a, b, w, n, e) = (self.a as i64, self.b as i64, self.w as i64, self.nbar as i64, self.eps as i64);
        [(b * e, -a * e), (-w * e, n * e)]
    }

    /// Exponents of `x₁` and `y₁` in `x` and `y`.
    pub fn inverse(&self) -> [(u32, u32); 2] {
        [(self.nbar, self.a), (self.w, self.b)]
    }

    /// Power of `x₁` in the image of key `P_j`.
    pub fn key_exponent(&self, j: usize) -> u64 {
        self.key_x1[j]
    }

    /// Power of `x₁` in the image of a key monomial.
    pub fn monomial_exponent(&self, exps: &[u32]) -> u64 {
        exps.iter().zip(&self.key_x1).map(|(&e, &k)| e as u64 * k).sum()
    }

    /// Residue of the unit `P_{j+1}(φ)/(x₁^λ·Q_j)`.
    pub fn unit_residue(&self, j: usize) -> &TowerElem {
        &self.rho[j]
    }

    fn chart_images(&self) -> [RingElem; 2] {
        let one = TowerElem::one(self.chart.tower());
        [
            RingElem::monomial(&self.chart, self.nbar, self.a, one.clone()),
            RingElem::monomial(&self.chart, self.w, self.b, one),
        ]
    }

    /// Rewrites a chart element in the recentered parameters.
    pub fn to_target(&self, f: &RingElem) -> RingElem {
        let z = &RingElem::y(&self.target) + &RingElem::constant(&self.target, self.center.clone());
        f.substitute(&[RingElem::x(&self.target), z])
    }

    pub fn to_chart(&self, f: &RingElem) -> RingElem {
        let y = &RingElem::y(&self.chart) - &RingElem::constant(&self.chart, self.center.clone());
        f.substitute(&[RingElem::x(&self.chart), y])
    }

    /// `f(φ)` in the chart coordinates.
    pub fn pull_to_chart(&self, f: &RingElem) -> Result<RingElem, BlowupError> {
        if !Arc::ptr_eq(f.ctx(), &self.source) {
            return Err(RingError::ContextMismatch(f.ctx().name().into(), self.source.name().into()).into());
        }
        Ok(f.substitute(&self.chart_images()))
    }
}

/// Smallest `a ≥ 0` with `n̄·b − w·a = ±1`, preferring `+1`.
pub fn euclid(nbar: u32, w: u32) -> Option<(u32, u32, i32)> {
    if num::integer::gcd(nbar, w) != 1 {
        return None;
    }
    let (n, w) = (nbar as u64, w as u64);
    for a in 0..=n {
        if (1 + w * a) % n == 0 {
            return Some((a as u32, ((1 + w * a) / n) as u32, 1));
        }
        if w * a >= 1 && (w * a - 1) % n == 0 {
            return Some((a as u32, ((w * a - 1) / n) as u32, -1));
        }
    }
    None
}

fn bump(name: &str, k: usize) -> String {
    format!("{}{k}", name.trim_end_matches(|c: char| c.is_ascii_digit()))
}

fn depth(name: &str) -> usize {
    let digits = &name[name.trim_end_matches(|c: char| c.is_ascii_digit()).len()..];
    digits.parse().unwrap_or(0)
}

/// The transform attached to the first key and the generating sequence it
/// induces on the new ring.
pub fn free_transform(g: &GenSeq) -> Result<(TransformMap, GenSeq), BlowupError> {
    let r = g.top();
    if r < 2 {
        return Err(BlowupError::InsufficientKeys(format!(
            "the transform needs P_2 but the sequence stops at P_{r}"
        )));
    }
    let GroupIndex::Finite(nb) = g.nbar(1) else {
        return Err(BlowupError::Precondition("n̄_1 is infinite".into()));
    };
    let nb = nb as u32;
    let w = g.u_exps(1).ok_or_else(|| BlowupError::Precondition("U_1 is unknown".into()))?[0];
    let (a, b, eps) =
        euclid(nb, w).ok_or_else(|| BlowupError::Precondition(format!("n̄_1 = {nb} and w = {w} are not coprime")))?;
    let alpha1 = g.alpha(1).ok_or_else(|| BlowupError::Precondition("α_1 is unknown".into()))?;
    let center = alpha1.pow(eps as i64)?;

    let mut key_x1 = vec![nb as u64, w as u64];
    for j in 2..=r {
        let n = g.n(j - 1).ok_or_else(|| BlowupError::Precondition(format!("n_{} is unknown", j - 1)))?;
        key_x1.push(key_x1[j - 1] * n as u64);
    }

    let src = g.ctx();
    let tower = g.tower();
    let k = depth(src.params()[0]) + 1;
    let mut names = [bump(src.params()[0], k), bump(src.params()[1], k)];
    let zname = if names[0] == format!("z{k}") { format!("w{k}") } else { format!("z{k}") };
    if names[1] == zname {
        names[1] = if names[0] == format!("y{k}") { format!("v{k}") } else { format!("y{k}") };
    }
    let residue = src.residue().with(center.clone());
    let mut prov = src.provenance().to_vec();
    prov.push(format!("free transform of {}", src.name()));
    let chart = LocalRingCtx::with_residue(
        &format!("{}_{k}c", src.name()),
        tower,
        residue.clone(),
        [&names[0], &names[1]],
        prov.clone(),
    )?;
    let target =
        LocalRingCtx::with_residue(&format!("{}_{k}", src.name()), tower, residue, [&names[0], &zname], prov)?;
    let mut m = TransformMap {
        a,
        b,
        eps,
        w,
        nbar: nb,
        center,
        source: src.clone(),
        chart,
        target,
        key_x1,
        rho: vec![TowerElem::one(tower)],
    };

    // ρ_1 = h'(c) with h(y₁) = P_2(φ)/x₁^{λ_1}
    let lam1 = m.key_x1[2] as u32;
    let img = m.pull_to_chart(g.key(2))?;
    if img.x_order() != Some(lam1) || img.deg_x() != Some(lam1) {
        return Err(BlowupError::Inconsistent(format!("P_2 does not map to x₁^{lam1} times a polynomial in y₁")));
    }
    let mut rho1 = TowerElem::zero(tower);
    for (&(_, j), c) in img.terms() {
        if j > 0 {
            rho1 = &rho1 + &(&(c * &TowerElem::from_int(tower, j as i64)) * &m.center.pow_u(j as u64 - 1));
        }
    }
    if rho1.is_zero() {
        return Err(BlowupError::Inconsistent("the center is a multiple root of the image of P_2".into()));
    }
    m.rho.push(rho1);
    for j in 2..r {
        let n = g.n(j).unwrap();
        let next = m.rho[j - 1].pow_u(n as u64);
        m.rho.push(next);
    }

    let mut spec = target_spec(g, &m)?;
    let draft = GenSeq::new(&m.target, g.group(), spec.clone())?;
    for i in 1..draft.top() {
        spec.steps[i - 1].alpha = formula_alpha(&draft, g, &m, i)?;
    }
    if !draft.nbar(draft.top()).is_infinite() && g.alpha(r).is_some() {
        spec.top_alpha = formula_alpha(&draft, g, &m, draft.top())?;
    }
    let out = GenSeq::new(&m.target, g.group(), spec)?;
    Ok((m, out))
}

fn target_spec(g: &GenSeq, m: &TransformMap) -> Result<GenSeqSpec, BlowupError> {
    let r = g.top();
    let beta0 = g.beta(0).scale(&rat(1, m.nbar as i64));
    let shifted = |j: usize| g.beta(j) - &beta0.scale(&int(m.key_x1[j] as i64));
    let mut steps = Vec::new();
    for i in 2..r {
        let step = &g.steps()[i - 1];
        let lam = m.key_x1[i + 1];
        let mut tail = Vec::new();
        for t in &step.tail {
            let tx = m.monomial_exponent(&t.exps);
            if tx < lam {
                return Err(BlowupError::Inconsistent(format!(
                    "tail monomial of P_{} maps to x₁^{tx}, below x₁^{lam}",
                    i + 1
                )));
            }
            let ye = m.a as u64 * t.exps[0] as u64 + m.b as u64 * t.exps[1] as u64;
            let mut c = &t.coeff.embed(g.tower())? * &m.center.pow_u(ye);
            for j in 2..=i {
                c = &c * &m.rho[j - 1].pow_u(t.exps[j] as u64);
            }
            c = c.div(&m.rho[i])?;
            let mut exps = vec![(tx - lam) as u32];
            exps.extend_from_slice(&t.exps[2..=i]);
            tail.push(TailTerm { coeff: c, exps });
        }
        steps.push(KeyStep { n: step.n, tail, beta_next: shifted(i + 1), alpha: None });
    }
    Ok(GenSeqSpec {
        beta0: beta0.clone(),
        beta1: shifted(2),
        steps,
        top_alpha: None,
        terminated: g.is_terminated(),
    })
}

/// Residue of the target Laurent monomial `Π Q_k^{e_k}` computed in the source.
pub fn target_residue(m: &TransformMap, source: &GenSeq, e: &[i64]) -> Result<TowerElem, BlowupError> {
    let mut big = e.first().copied().unwrap_or(0);
    for (k, &ek) in e.iter().enumerate().skip(1) {
        big -= ek * m.key_x1[k + 1] as i64;
    }
    let [(fx, fy), _] = m.forward();
    let mut s = vec![0i64; (e.len() + 1).max(2)];
    s[0] = fx * big;
    s[1] = fy * big;
    for (k, &ek) in e.iter().enumerate().skip(1) {
        s[k + 1] += ek;
    }
    let mut res = source.residue_laurent(&s)?;
    for (k, &ek) in e.iter().enumerate().skip(1) {
        res = &res * &m.rho[k].pow(-ek)?;
    }
    Ok(res)
}

fn formula_alpha(draft: &GenSeq, source: &GenSeq, m: &TransformMap, i: usize) -> Result<Option<TowerElem>, BlowupError> {
    let (GroupIndex::Finite(nb), Some(u)) = (draft.nbar(i), draft.u_exps(i)) else { return Ok(None) };
    let mut e: Vec<i64> = u.iter().map(|&x| -(x as i64)).collect();
    e.push(nb as i64);
    match target_residue(m, source, &e) {
        Ok(a) => Ok(Some(a)),
        Err(BlowupError::GenSeq(GenSeqError::InsufficientData(_))) => Ok(None),
        Err(err) => Err(err),
    }
}

fn normalize(f: RingElem) -> RingElem {
    match f.terms().values().next() {
        Some(c) if !c.is_one() => {
            let inv = c.inv().expect("nonzero coefficient");
            f.scale(&inv)
        }
        _ => f,
    }
}

/// `f(φ)` with the largest powers of `x₁` and `y₁` removed, recentered and
/// scaled so its first monomial has coefficient 1.
pub fn strict_transform(f: &RingElem, m: &TransformMap) -> Result<RingElem, BlowupError> {
    if f.is_zero() {
        return Err(BlowupError::Precondition("zero has no strict transform".into()));
    }
    let img = m.pull_to_chart(f)?;
    let h = img.div_monomial(img.x_order().unwrap(), img.y_order().unwrap());
    Ok(normalize(m.to_target(&h)))
}

/// Power of `x₁` removed by [`strict_transform`].
pub fn exceptional_power(f: &RingElem, m: &TransformMap) -> Result<u32, BlowupError> {
    if f.is_zero() {
        return Err(BlowupError::Precondition("zero has no strict transform".into()));
    }
    Ok(m.pull_to_chart(f)?.x_order().unwrap())
}

/// `f(φ)` in the recentered parameters, nothing removed.
pub fn total_transform(f: &RingElem, m: &TransformMap) -> Result<RingElem, BlowupError> {
    Ok(m.to_target(&m.pull_to_chart(f)?))
}

/// For a key monomial of value above `β_i` (or equal, using only lower
/// keys), the `x₁` exponent `t` against `λ`, the exponent for `P_i`.
/// `None` when the monomial does not qualify.
pub fn exceptional_exponents(g: &GenSeq, m: &TransformMap, exps: &[u32], i: usize) -> Option<(u64, u64, bool)> {
    let v = g.monomial_value(exps);
    let top = exps.iter().rposition(|&e| e > 0).unwrap_or(0);
    let above = g.group().lt(g.beta(i), &v).ok()?;
    let qualifies = above || (v == *g.beta(i) && top < i);
    if !qualifies || exps.len() > m.key_x1.len() {
        return None;
    }
    let t = m.monomial_exponent(exps);
    let lam = m.key_x1[i];
    let exceptional = i == 1 && m.nbar == 1 && m.w == 1 && exps.iter().enumerate().all(|(k, &e)| e == (k == 0) as u32);
    let ok = if exceptional { t == lam } else { t > lam };
    Some((t, lam, ok))
}

/// Shape of the strict transform of a deeper key.
#[derive(Clone, Debug)]
pub struct StrictKeyForm {
    pub key: usize,
    pub value: Result<Value, String>,
    pub expected: Value,
    /// Order in `z₁` modulo `x₁`, for the strict transform and the target key.
    pub z_orders: (Option<u32>, Option<u32>),
    /// Residue of the unit relating the two modulo `x₁`.
    pub unit: Option<TowerElem>,
    pub holds: bool,
}

fn mod_x1(f: &RingElem) -> RingElem {
    RingElem::from_terms(f.ctx(), f.terms().iter().filter(|(k, _)| k.0 == 0).map(|(&k, c)| (k, c.clone())))
}

/// Compares the strict transform of `P_j`, `j ≥ 2`, with `Q_{j−1}`.
pub fn strict_key_form(source: &GenSeq, m: &TransformMap, target: &GenSeq, j: usize) -> Result<StrictKeyForm, BlowupError> {
    if j < 2 || j > source.top() || j - 1 > target.top() {
        return Err(BlowupError::Precondition(format!("no key pair for P_{j}")));
    }
    let st = strict_transform(source.key(j), m)?;
    let q = target.key(j - 1);
    let (sm, qm) = (mod_x1(&st), mod_x1(q));
    let z_orders = (sm.y_order(), qm.y_order());
    let unit = match z_orders {
        (Some(a), Some(b)) if a == b => {
            let cs = sm.coeff(0, a);
            let cq = qm.coeff(0, b);
            Some(cs.div(&cq)?)
        }
        _ => None,
    };
    let value = evaluate(&st, target).map_err(|e| e.to_string());
    let expected = target.beta(j - 1).clone();
    let holds = unit.is_some() && value.as_ref().is_ok_and(|v| *v == expected);
    Ok(StrictKeyForm { key: j, value, expected, z_orders, unit, holds })
}

/// Values on the new ring computed by pulling back to the source sequence.
#[derive(Clone)]
pub struct Pullback {
    source: GenSeq,
    map: TransformMap,
}

impl Pullback {
    pub fn new(source: &GenSeq, map: &TransformMap) -> Pullback {
        Pullback { source: source.clone(), map: map.clone() }
    }

    /// `f = F/(x^A·y^B)` with `F` in the source ring.
    pub fn pull(&self, f: &RingElem) -> Option<(RingElem, (u32, u32))> {
        let st = self.source.ctx().tower();
        if self.map.center.embed(st).is_err() || f.terms().values().any(|c| c.embed(st).is_err()) {
            return None;
        }
        let [(ax, ay), (bx, by)] = self.map.forward();
        let one = TowerElem::one(st);
        let x1 = LaurentPoly::monomial(st, ax, ay, one.clone());
        let z1 = LaurentPoly::monomial(st, bx, by, one)
            .add(&LaurentPoly::constant(st, -&self.map.center.embed(st).ok()?));
        let l = f.substitute_laurent(&[x1, z1]);
        Some(l.clear(self.source.ctx()))
    }
}

impl ValuationOracle for Pullback {
    fn oracle_value(&self, f: &RingElem) -> Result<OracleValue, RingError> {
        if f.is_zero() {
            return Ok(OracleValue::Undecided("zero".into()));
        }
        let Some((big, (a, b))) = self.pull(f) else {
            return Ok(OracleValue::Undecided("coefficients outside the source residue field".into()));
        };
        Ok(match evaluate(&big, &self.source) {
            Ok(v) => OracleValue::Exact(
                &(&v - &self.source.beta(0).times(a as i64)) - &self.source.beta(1).times(b as i64),
            ),
            Err(e) => OracleValue::Undecided(e.to_string()),
        })
    }

    fn oracle_residue(&self, num: &RingElem, den: &RingElem) -> Result<Option<TowerElem>, RingError> {
        let (Some((fnum, (an, bn))), Some((fden, (ad, bd)))) = (self.pull(num), self.pull(den)) else {
            return Ok(None);
        };
        let gn = fnum.mul_monomial(ad, bd);
        let gd = fden.mul_monomial(an, bn);
        self.source.oracle_residue(&gn, &gd)
    }
}

#[cfg(test)]
mod tests;
