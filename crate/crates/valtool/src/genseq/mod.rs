//! Generating sequences of a valuation dominating a two-dimensional regular
//! local ring: key-polynomial recursion data, derived indices and residues,
//! expansions in key monomials, and evaluation.

mod expand;
mod validate;

pub use expand::{evaluate, expand, initial_form, residue_of_monomial, ExpTerm, GradedElem, PAdicExpansion};
pub use validate::{validate_sequence, Check, CheckOutcome, ValidationReport};
pub(crate) use expand::{form_ratio, residue_sum};

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::arith::{
    degree_over, group_index, in_group, ArithError, GroupIndex, ResidueTower, Subfield, TowerElem, Value,
    ValueGroup,
};
use crate::ring::{LocalRingCtx, OracleValue, RingElem, RingError, ValuationOracle};

#[derive(Debug, Clone, Error)]
pub enum GenSeqError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("malformed sequence: {0}")]
    Malformed(String),
    #[error("insufficient generating-sequence data: {0}")]
    InsufficientData(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// One term `c·P_0^{σ_0}···P_i^{σ_i}` of a recursion tail.
#[derive(Clone, Debug)]
pub struct TailTerm {
    pub coeff: TowerElem,
    pub exps: Vec<u32>,
}

/// Recursion `P_{i+1} = P_i^{n_i} + Σ c_k P_0^{σ_0(k)}···P_i^{σ_i(k)}` with
/// the value assigned to `P_{i+1}`.
#[derive(Clone, Debug)]
pub struct KeyStep {
    pub n: u32,
    pub tail: Vec<TailTerm>,
    pub beta_next: Value,
    /// Residue generator to use when `d_i > 1`; otherwise a new tower level
    /// is adjoined.
    pub alpha: Option<TowerElem>,
}

/// User-facing description of a sequence prefix.
#[derive(Clone, Debug)]
pub struct GenSeqSpec {
    pub beta0: Value,
    pub beta1: Value,
    pub steps: Vec<KeyStep>,
    /// Residue `[P_r^{n̄_r}/U_r]` of the last key, when known.
    pub top_alpha: Option<TowerElem>,
    /// The sequence stops at its last key.
    pub terminated: bool,
}

/// Derived data of key `P_i`, `i ≥ 1`.
#[derive(Clone, Debug)]
pub struct KeyInfo {
    pub nbar: GroupIndex,
    /// Exponents `w_0..w_{i-1}` of `U_i`.
    pub u: Option<Vec<u32>>,
    pub d: Option<u32>,
    pub n: Option<u32>,
    pub alpha: Option<TowerElem>,
    /// Monic `f_i`, low to high.
    pub minpoly: Option<Vec<TowerElem>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopResidueSource {
    Derived,
    Declared,
    Oracle,
    Convention,
    Unknown,
}

pub type SharedOracle = Arc<dyn ValuationOracle + Send + Sync>;

#[derive(Clone)]
pub struct GenSeq {
    ctx: Arc<LocalRingCtx>,
    group: ValueGroup,
    tower: Arc<ResidueTower>,
    betas: Vec<Value>,
    steps: Vec<KeyStep>,
    info: Vec<KeyInfo>,
    top_source: TopResidueSource,
    terminated: bool,
    keys: Vec<OnceLock<RingElem>>,
    oracle: Option<SharedOracle>,
    issues: Vec<(Option<usize>, String)>,
}

impl fmt::Debug for GenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenSeq")
            .field("ring", &self.ctx.name())
            .field("betas", &self.betas.iter().map(|b| b.to_string()).collect::<Vec<_>>())
            .field("terminated", &self.terminated)
            .finish()
    }
}

impl GenSeq {
    pub fn new(ctx: &Arc<LocalRingCtx>, group: &ValueGroup, spec: GenSeqSpec) -> Result<GenSeq, GenSeqError> {
        let GenSeqSpec { beta0, beta1, steps, top_alpha, terminated } = spec;
        let mut betas = vec![beta0, beta1];
        for (k, s) in steps.iter().enumerate() {
            let i = k + 1;
            if s.n == 0 {
                return Err(GenSeqError::Malformed(format!("n_{i} must be positive")));
            }
            if s.tail.is_empty() {
                return Err(GenSeqError::Malformed(format!("step {i} has an empty tail")));
            }
            for t in &s.tail {
                if t.exps.len() != i + 1 {
                    return Err(GenSeqError::Malformed(format!(
                        "tail term of step {i} has {} exponents, expected {}",
                        t.exps.len(),
                        i + 1
                    )));
                }
                if t.coeff.is_zero() {
                    return Err(GenSeqError::Malformed(format!("zero tail coefficient in step {i}")));
                }
                t.coeff.embed(ctx.tower())?;
            }
            betas.push(s.beta_next.clone());
        }
        let r = betas.len() - 1;
        let mut g = GenSeq {
            ctx: ctx.clone(),
            group: group.clone(),
            tower: ctx.tower().clone(),
            betas,
            steps,
            info: Vec::new(),
            top_source: TopResidueSource::Unknown,
            terminated,
            keys: (0..=r).map(|_| OnceLock::new()).collect(),
            oracle: None,
            issues: Vec::new(),
        };
        // monic keys are needed before any division
        for i in 1..r {
            let di = g.key_degree(i);
            let step = &g.steps[i - 1];
            for t in &step.tail {
                let deg: u64 = (1..=i).map(|s| t.exps[s] as u64 * g.key_degree(s)).sum();
                if deg >= step.n as u64 * di {
                    return Err(GenSeqError::Malformed(format!(
                        "tail term of step {i} has y-degree {deg}, key P_{} would not be monic",
                        i + 1
                    )));
                }
            }
        }
        g.info.push(KeyInfo {
            nbar: GroupIndex::Finite(1),
            u: Some(Vec::new()),
            d: Some(1),
            n: None,
            alpha: Some(TowerElem::one(&g.tower)),
            minpoly: None,
        });
        for i in 1..=r {
            let info = g.derive(i)?;
            g.info.push(info);
        }
        g.resolve_top(top_alpha)?;
        Ok(g)
    }

    /// Attaches a brute-force oracle; the top residue is taken from it when
    /// not declared.
    pub fn with_oracle(mut self, oracle: SharedOracle) -> Result<GenSeq, GenSeqError> {
        self.oracle = Some(oracle);
        if self.info[self.top()].alpha.is_none() {
            if let Some(a) = self.oracle_alpha(self.top())? {
                let a = self.absorb(&a)?;
                self.info.last_mut().unwrap().alpha = Some(a);
                self.top_source = TopResidueSource::Oracle;
                self.finish_top()?;
            }
        }
        Ok(self)
    }

    fn derive(&mut self, i: usize) -> Result<KeyInfo, GenSeqError> {
        let nbar = group_index(&self.betas[..=i], &self.betas[..i])?;
        let mut info = KeyInfo { nbar, u: None, d: None, n: None, alpha: None, minpoly: None };
        let GroupIndex::Finite(nb) = nbar else {
            if i < self.top() {
                self.issues.push((Some(i), format!("n̄_{i} is infinite but the sequence continues")));
            }
            return Ok(info);
        };
        let target = self.betas[i].times(nb as i64);
        info.u = self.represent(&target, i - 1)?;
        if info.u.is_none() {
            self.issues.push((Some(i), format!("no U_{i}: {target} is not a reduced combination of lower values")));
        }
        if i == self.top() {
            return Ok(info);
        }
        let step = self.steps[i - 1].clone();
        info.n = Some(step.n);
        if !(step.n as u64).is_multiple_of(nb) {
            self.issues.push((Some(i), format!("n̄_{i} = {nb} does not divide n_{i} = {}", step.n)));
            return Ok(info);
        }
        let d = (step.n as u64 / nb) as u32;
        info.d = Some(d);
        let Some(u) = info.u.clone() else { return Ok(info) };
        let mut b = vec![TowerElem::zero(&self.tower); d as usize];
        for t in &step.tail {
            let sii = t.exps[i] as u64;
            if !sii.is_multiple_of(nb) || sii / nb >= d as u64 {
                continue;
            }
            let tt = (sii / nb) as usize;
            let e: Vec<i64> =
                (0..i).map(|k| t.exps[k] as i64 - (d as i64 - tt as i64) * u[k] as i64).collect();
            match self.residue_laurent(&e) {
                Ok(res) => {
                    let c = t.coeff.embed(&self.tower)?;
                    b[tt] = &b[tt] + &(&c * &res);
                }
                Err(err) => {
                    self.issues.push((Some(i), format!("tail residue at level {i}: {err}")));
                    return Ok(info);
                }
            }
        }
        let mut f = b;
        f.push(TowerElem::one(&self.tower));
        let alpha = if let Some(a) = &step.alpha {
            Some(self.absorb(a)?)
        } else if d == 1 {
            Some(-&f[0])
        } else {
            let name = self.fresh_name(i);
            let coeffs: Vec<TowerElem> = f.iter().map(|c| c.embed(&self.tower)).collect::<Result<_, _>>()?;
            match self.tower.extend(&name, &coeffs) {
                Ok(t) => {
                    self.lift_tower(&t)?;
                    Some(TowerElem::generator(&self.tower, self.tower.num_levels() - 1))
                }
                Err(err) => {
                    self.issues.push((Some(i), format!("f_{i} does not define a field extension: {err}")));
                    None
                }
            }
        };
        info.minpoly = Some(f.iter().map(|c| c.embed(&self.tower)).collect::<Result<_, _>>()?);
        info.alpha = alpha;
        Ok(info)
    }

    fn fresh_name(&self, i: usize) -> String {
        let mut name = format!("alpha{i}");
        while self.tower.level_index(&name).is_some() {
            name.push('\'');
        }
        name
    }

    /// Moves every stored residue into the extended tower `t`.
    fn lift_tower(&mut self, t: &Arc<ResidueTower>) -> Result<(), GenSeqError> {
        for info in &mut self.info {
            if let Some(a) = &info.alpha {
                info.alpha = Some(a.embed(t)?);
            }
            if let Some(f) = &info.minpoly {
                info.minpoly = Some(f.iter().map(|c| c.embed(t)).collect::<Result<_, _>>()?);
            }
        }
        self.tower = t.clone();
        Ok(())
    }

    /// Brings a foreign residue into this sequence's tower.
    fn absorb(&mut self, a: &TowerElem) -> Result<TowerElem, GenSeqError> {
        if let Ok(e) = a.embed(&self.tower) {
            return Ok(e);
        }
        if self.tower.is_prefix_of(a.tower()) {
            let t = a.tower().clone();
            self.lift_tower(&t)?;
            return Ok(a.clone());
        }
        Err(GenSeqError::Arith(ArithError::TowerMismatch))
    }

    fn resolve_top(&mut self, declared: Option<TowerElem>) -> Result<(), GenSeqError> {
        let r = self.top();
        if self.info[r].nbar.is_infinite() {
            self.info[r].alpha = Some(TowerElem::one(&self.tower));
            self.top_source = TopResidueSource::Convention;
        } else if let Some(a) = declared {
            let a = self.absorb(&a)?;
            self.info[r].alpha = Some(a);
            self.top_source = TopResidueSource::Declared;
        }
        if self.terminated && !self.info[r].nbar.is_infinite() {
            self.issues.push((
                Some(r),
                format!("declared terminated but n̄_{r} is finite; only the infinite-index termination is supported"),
            ));
        }
        self.finish_top()
    }

    fn finish_top(&mut self) -> Result<(), GenSeqError> {
        let r = self.top();
        let GroupIndex::Finite(nb) = self.info[r].nbar else { return Ok(()) };
        let Some(a) = self.info[r].alpha.clone() else { return Ok(()) };
        let sub = self.residue_through(r - 1);
        let d = degree_over(&a, &sub)? as u32;
        self.info[r].d = Some(d);
        self.info[r].n = Some(nb as u32 * d);
        Ok(())
    }

    fn oracle_alpha(&self, i: usize) -> Result<Option<TowerElem>, GenSeqError> {
        let Some(o) = &self.oracle else { return Ok(None) };
        let (GroupIndex::Finite(nb), Some(u)) = (self.info[i].nbar, &self.info[i].u) else { return Ok(None) };
        let num = self.key(i).pow(nb as u32);
        let den = self.monomial(u);
        Ok(o.oracle_residue(&num, &den)?)
    }

    pub fn ctx(&self) -> &Arc<LocalRingCtx> {
        &self.ctx
    }

    pub fn group(&self) -> &ValueGroup {
        &self.group
    }

    /// Tower holding `R/m_R` and every derived residue.
    pub fn tower(&self) -> &Arc<ResidueTower> {
        &self.tower
    }

    pub fn betas(&self) -> &[Value] {
        &self.betas
    }

    pub fn beta(&self, i: usize) -> &Value {
        &self.betas[i]
    }

    pub fn steps(&self) -> &[KeyStep] {
        &self.steps
    }

    pub fn info(&self, i: usize) -> &KeyInfo {
        &self.info[i]
    }

    /// Index of the last key.
    pub fn top(&self) -> usize {
        self.betas.len() - 1
    }

    pub fn num_keys(&self) -> usize {
        self.betas.len()
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn top_source(&self) -> &TopResidueSource {
        &self.top_source
    }

    pub fn oracle(&self) -> Option<&SharedOracle> {
        self.oracle.as_ref()
    }

    pub(crate) fn issues(&self) -> &[(Option<usize>, String)] {
        &self.issues
    }

    pub fn nbar(&self, i: usize) -> GroupIndex {
        self.info[i].nbar
    }

    pub fn n(&self, i: usize) -> Option<u32> {
        self.info[i].n
    }

    pub fn d(&self, i: usize) -> Option<u32> {
        self.info[i].d
    }

    pub fn alpha(&self, i: usize) -> Option<&TowerElem> {
        self.info[i].alpha.as_ref()
    }

    pub fn u_exps(&self, i: usize) -> Option<&[u32]> {
        self.info[i].u.as_deref()
    }

    /// `R/m_R(α_1, …, α_i)` inside the sequence tower.
    pub fn residue_through(&self, i: usize) -> Subfield {
        let mut s = self.ctx.residue().clone();
        for k in 1..=i.min(self.top()) {
            if let Some(a) = &self.info[k].alpha {
                s = s.with(a.clone());
            }
        }
        s
    }

    /// `n_i > 1`, counting an infinite group index as a jump.
    pub fn is_jump(&self, i: usize) -> bool {
        if i == 0 {
            return true;
        }
        self.info[i].nbar.is_infinite() || self.info[i].n.is_some_and(|n| n > 1)
    }

    /// y-degree of `P_i`.
    pub fn key_degree(&self, i: usize) -> u64 {
        if i == 0 {
            return 0;
        }
        self.steps[..i - 1].iter().map(|s| s.n as u64).product()
    }

    /// Key polynomial `P_i`, built on first use.
    pub fn key(&self, i: usize) -> &RingElem {
        self.keys[i].get_or_init(|| match i {
            0 => RingElem::x(&self.ctx),
            1 => RingElem::y(&self.ctx),
            _ => {
                let s = &self.steps[i - 2];
                let mut p = self.key(i - 1).pow(s.n);
                for t in &s.tail {
                    let c = t.coeff.embed(self.ctx.tower()).expect("checked at construction");
                    p = &p + &self.monomial(&t.exps).scale(&c);
                }
                p
            }
        })
    }

    /// `Π P_k^{e_k}`.
    pub fn monomial(&self, exps: &[u32]) -> RingElem {
        let mut m = RingElem::one(&self.ctx);
        for (k, &e) in exps.iter().enumerate() {
            if e > 0 {
                m = &m * &self.key(k).pow(e);
            }
        }
        m
    }

    pub fn monomial_value(&self, exps: &[u32]) -> Value {
        exps.iter().zip(&self.betas).map(|(&e, b)| b.times(e as i64)).sum()
    }

    pub fn laurent_value(&self, exps: &[i64]) -> Value {
        exps.iter().zip(&self.betas).map(|(&e, b)| b.times(e)).sum()
    }

    /// Reduced representation `γ = Σ a_k β_k` over keys `0..=top`, largest
    /// exponents first from the top.
    pub fn represent(&self, gamma: &Value, top: usize) -> Result<Option<Vec<u32>>, GenSeqError> {
        if self.group.sign(gamma)? == Ordering::Less {
            return Ok(None);
        }
        let mut out = vec![0u32; top + 1];
        if self.rep_rec(gamma, top, &mut out)? {
            Ok(Some(out))
        } else {
            Ok(None)
        }
    }

    fn rep_rec(&self, gamma: &Value, j: usize, out: &mut [u32]) -> Result<bool, GenSeqError> {
        if j == 0 {
            return Ok(match gamma.ratio_to(&self.betas[0]) {
                Some(q) if q.is_integer() && q >= num::zero() => {
                    out[0] = q.to_integer().try_into().map_err(|_| ArithError::IndexOverflow)?;
                    true
                }
                _ => false,
            });
        }
        let beta = &self.betas[j];
        let cap = self.info.get(j).and_then(|i| i.n).map(|n| n - 1);
        let mut amax = 0u32;
        if beta.is_rational() && gamma.is_rational() {
            let q = (&gamma.q0 / &beta.q0).floor().to_integer();
            amax = u32::try_from(q).unwrap_or(u32::MAX);
            if let Some(c) = cap {
                amax = amax.min(c);
            }
        } else {
            while cap.is_none_or(|c| amax < c) && self.group.le(&beta.times(amax as i64 + 1), gamma)? {
                amax += 1;
            }
        }
        let below = &self.betas[..j];
        for a in (0..=amax).rev() {
            let rem = gamma - &beta.times(a as i64);
            if !in_group(&rem, below) {
                continue;
            }
            if self.rep_rec(&rem, j - 1, out)? {
                out[j] = a;
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Residue of a value-zero Laurent monomial in the keys.
    pub fn residue_laurent(&self, exps: &[i64]) -> Result<TowerElem, GenSeqError> {
        let v = self.laurent_value(exps);
        if !v.is_zero() {
            return Err(GenSeqError::Precondition(format!("Laurent monomial has value {v}, not 0")));
        }
        let mut e = exps.to_vec();
        let mut acc = TowerElem::one(&self.tower);
        for j in (1..e.len()).rev() {
            if e[j] == 0 {
                continue;
            }
            let GroupIndex::Finite(nb) = self.info[j].nbar else {
                return Err(GenSeqError::Inconsistent(format!("exponent of P_{j} with infinite n̄")));
            };
            let nb = nb as i64;
            if e[j] % nb != 0 {
                return Err(GenSeqError::Inconsistent(format!(
                    "exponent {} of P_{j} is not a multiple of n̄_{j} = {nb}",
                    e[j]
                )));
            }
            let s = e[j] / nb;
            let u = self.info[j].u.as_ref().ok_or_else(|| GenSeqError::InsufficientData(format!("U_{j} unknown")))?;
            let alpha = self.info[j].alpha.as_ref().ok_or_else(|| {
                GenSeqError::InsufficientData(format!("residue α_{j} is not known"))
            })?;
            acc = &acc * &alpha.pow(s)?;
            e[j] = 0;
            for (k, &w) in u.iter().enumerate() {
                e[k] += s * w as i64;
            }
        }
        if e.first().is_some_and(|&e0| e0 != 0) {
            return Err(GenSeqError::Inconsistent("leftover power of P_0".into()));
        }
        Ok(acc)
    }

    /// Indices `σ_0 = 0 < σ_1 < …` of the keys with `n_j > 1` in the prefix.
    pub fn sigma_indices(&self) -> Vec<usize> {
        let mut out = vec![0];
        out.extend((1..=self.top()).filter(|&j| self.is_jump(j)));
        out
    }

    /// Unique reduced representation of `γ` in the β's, or `None`.
    pub fn semigroup_membership(&self, gamma: &Value) -> Result<Option<Vec<u32>>, GenSeqError> {
        self.represent(gamma, self.top())
    }

    /// Total order on values of this sequence.
    pub fn cmp_values(&self, a: &Value, b: &Value) -> Result<Ordering, GenSeqError> {
        Ok(self.group.cmp(a, b)?)
    }

    pub(crate) fn has_oracle_alpha(&self, i: usize) -> Result<Option<TowerElem>, GenSeqError> {
        self.oracle_alpha(i)
    }
}

pub fn sigma_indices(g: &GenSeq) -> Vec<usize> {
    g.sigma_indices()
}

pub fn semigroup_membership(gamma: &Value, g: &GenSeq) -> Result<Option<Vec<u32>>, GenSeqError> {
    g.semigroup_membership(gamma)
}

impl ValuationOracle for GenSeq {
    fn oracle_value(&self, f: &RingElem) -> Result<OracleValue, RingError> {
        Ok(match evaluate(f, self) {
            Ok(v) => OracleValue::Exact(v),
            Err(e) => OracleValue::Undecided(e.to_string()),
        })
    }

    fn oracle_residue(&self, num: &RingElem, den: &RingElem) -> Result<Option<TowerElem>, RingError> {
        let (Ok(a), Ok(b)) = (initial_form(num, self), initial_form(den, self)) else { return Ok(None) };
        Ok(expand::form_ratio(self, &a, &b).ok().flatten())
    }
}

#[cfg(test)]
pub(crate) mod tests;
