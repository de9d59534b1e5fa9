//! Several valuations of S compared through their restrictions to R.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ExtensionError, ExtensionMap};
use crate::arith::{TowerElem, Value, ValueGroup};
use crate::genseq::{evaluate, GenSeq};
use crate::ring::{LocalRingCtx, OracleValue, RingElem, SeriesEmbedding, ValuationOracle};

#[derive(Clone, Debug)]
pub enum CandidateKind {
    Seq(GenSeq),
    Series(SeriesEmbedding),
}

/// A named valuation of S.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub kind: CandidateKind,
}

impl Candidate {
    pub fn seq(name: &str, g: GenSeq) -> Candidate {
        Candidate { name: name.into(), kind: CandidateKind::Seq(g) }
    }

    pub fn series(name: &str, s: SeriesEmbedding) -> Candidate {
        Candidate { name: name.into(), kind: CandidateKind::Series(s) }
    }

    fn ctx(&self) -> &std::sync::Arc<LocalRingCtx> {
        match &self.kind {
            CandidateKind::Seq(g) => g.ctx(),
            CandidateKind::Series(s) => s.ctx(),
        }
    }

    fn value(&self, f: &RingElem) -> Result<OracleValue, ExtensionError> {
        Ok(match &self.kind {
            CandidateKind::Seq(g) => g.oracle_value(f)?,
            CandidateKind::Series(s) => s.oracle_value(f)?,
        })
    }

    /// Elements on which this valuation is large: its keys, or `y` minus
    /// the known part of its series when `x ↦ t^m`.
    fn witnesses(&self) -> Vec<RingElem> {
        match &self.kind {
            CandidateKind::Seq(g) => (1..=g.top()).map(|k| g.key(k).clone()).collect(),
            CandidateKind::Series(s) => {
                let [xs, ys] = s.images();
                let ctx = s.ctx();
                let xt: Vec<_> = xs.terms().iter().filter(|(_, c)| !c.is_zero()).collect();
                let m = match xt.as_slice() {
                    [(&m, c)] if c.is_one() && xs.precision().is_none() => m,
                    _ => return Vec::new(),
                };
                let mut w = RingElem::y(ctx);
                for (&e, c) in ys.terms() {
                    if e % m != 0 {
                        break;
                    }
                    w = &w - &RingElem::monomial(ctx, (e / m) as u32, 0, c.clone());
                }
                vec![w]
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SplitOptions {
    pub seed: u64,
    pub samples: usize,
    /// Samples whose value on R exceeds this are skipped.
    pub value_bound: Option<Value>,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { seed: 0, samples: 24, value_bound: None }
    }
}

#[derive(Clone, Debug)]
pub struct CandidateResult {
    pub name: String,
    pub rejection: Option<String>,
    pub checked: usize,
    pub agreed: usize,
    pub undecided: usize,
    /// `(element of R, value on R, value of its image)`.
    pub mismatches: Vec<(String, Value, String)>,
}

impl CandidateResult {
    pub fn restricts(&self) -> bool {
        self.rejection.is_none() && self.mismatches.is_empty() && self.agreed > 0
    }
}

#[derive(Clone, Debug)]
pub struct SplittingReport {
    pub candidates: Vec<CandidateResult>,
    /// Candidates restricting to the valuation of R, grouped by
    /// indistinguishability on the witness elements.
    pub classes: Vec<Vec<usize>>,
    /// `(witness, value under each candidate)`.
    pub witnesses: Vec<(String, Vec<String>)>,
}

impl SplittingReport {
    pub fn distinct(&self) -> usize {
        self.classes.len()
    }

    /// Two distinct extensions of the valuation were exhibited.
    pub fn splitting(&self) -> bool {
        self.classes.len() >= 2
    }
}

impl fmt::Display for SplittingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "splitting report")?;
        for c in &self.candidates {
            match &c.rejection {
                Some(why) => writeln!(f, "  {}: rejected ({why})", c.name)?,
                None => writeln!(
                    f,
                    "  {}: {} of {} test elements agree, {} undecided, {} mismatches",
                    c.name,
                    c.agreed,
                    c.checked,
                    c.undecided,
                    c.mismatches.len()
                )?,
            }
            for (e, v, w) in &c.mismatches {
                writeln!(f, "    {e}: {v} on R, {w} on the image")?;
            }
        }
        for (w, vals) in &self.witnesses {
            writeln!(f, "  witness {w}: {}", vals.join(", "))?;
        }
        writeln!(
            f,
            "  distinct restricting candidates: {}; splitting {}",
            self.distinct(),
            if self.splitting() { "witnessed" } else { "not witnessed" }
        )
    }
}

fn show(v: &OracleValue) -> String {
    match v {
        OracleValue::Exact(v) => v.to_string(),
        OracleValue::AtLeast(v) => format!("≥ {v}"),
        OracleValue::Undecided(_) => "?".into(),
    }
}

/// The two answers cannot come from equal values.
fn differ(a: &OracleValue, b: &OracleValue, grp: &ValueGroup) -> bool {
    use OracleValue::*;
    match (a, b) {
        (Exact(x), Exact(y)) => x != y,
        (Exact(x), AtLeast(y)) | (AtLeast(y), Exact(x)) => grp.lt(x, y).unwrap_or(false),
        _ => false,
    }
}

fn random_element(ctx: &std::sync::Arc<LocalRingCtx>, rng: &mut ChaCha8Rng) -> RingElem {
    let t = ctx.tower();
    let n = rng.gen_range(1..=4);
    let mut f = RingElem::zero(ctx);
    for _ in 0..n {
        let (i, j) = loop {
            let (i, j) = (rng.gen_range(0..6u32), rng.gen_range(0..4u32));
            if i + j > 0 {
                break (i, j);
            }
        };
        let c = loop {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                break c;
            }
        };
        f = &f + &RingElem::monomial(ctx, i, j, TowerElem::from_int(t, c));
    }
    f
}

/// Checks which candidates restrict to the valuation of `g_r` along `ext`,
/// and how many of them are told apart.
pub fn splitting_report(
    candidates: &[Candidate],
    ext: &ExtensionMap,
    g_r: &GenSeq,
    opts: &SplitOptions,
) -> Result<SplittingReport, ExtensionError> {
    if !LocalRingCtx::same(ext.source(), g_r.ctx()) {
        return Err(ExtensionError::Precondition("extension map does not start at the ring of the sequence".into()));
    }
    let grp = g_r.group();
    let mut tests: Vec<(RingElem, Value)> = (0..=g_r.top()).map(|k| (g_r.key(k).clone(), g_r.beta(k).clone())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tries = 0;
    let mut added = 0;
    while added < opts.samples && tries < opts.samples * 20 {
        tries += 1;
        let f = random_element(g_r.ctx(), &mut rng);
        if f.is_zero() {
            continue;
        }
        let Ok(v) = evaluate(&f, g_r) else { continue };
        if let Some(b) = &opts.value_bound {
            if !grp.le(&v, b).unwrap_or(false) {
                continue;
            }
        }
        tests.push((f, v));
        added += 1;
    }
    let images: Vec<RingElem> = tests.iter().map(|(f, _)| ext.image(f)).collect::<Result<_, _>>()?;

    let mut results = Vec::new();
    for c in candidates {
        let mut r = CandidateResult {
            name: c.name.clone(),
            rejection: None,
            checked: 0,
            agreed: 0,
            undecided: 0,
            mismatches: Vec::new(),
        };
        if !LocalRingCtx::same(c.ctx(), ext.target()) {
            r.rejection = Some(format!("lives on {}, not on {}", c.ctx().name(), ext.target().name()));
            results.push(r);
            continue;
        }
        for k in 0..2 {
            let p = RingElem::param(c.ctx(), k);
            match c.value(&p)? {
                OracleValue::Exact(v) if grp.is_positive(&v).unwrap_or(false) => {}
                other => {
                    r.rejection = Some(format!(
                        "does not dominate {}: value of {} is {}",
                        c.ctx().name(),
                        c.ctx().params()[k],
                        show(&other)
                    ));
                }
            }
        }
        if r.rejection.is_none() {
            for ((f, v), im) in tests.iter().zip(&images) {
                r.checked += 1;
                let w = c.value(im)?;
                let expected = OracleValue::Exact(v.clone());
                if differ(&expected, &w, grp) {
                    r.mismatches.push((f.to_string(), v.clone(), show(&w)));
                } else if w.exact().is_some() {
                    r.agreed += 1;
                } else {
                    r.undecided += 1;
                }
            }
        }
        results.push(r);
    }

    let mut wit_elems: Vec<RingElem> = Vec::new();
    for c in candidates {
        if LocalRingCtx::same(c.ctx(), ext.target()) {
            wit_elems.extend(c.witnesses());
        }
    }
    let table: Vec<Vec<OracleValue>> = wit_elems
        .iter()
        .map(|w| {
            candidates
                .iter()
                .map(|c| match LocalRingCtx::same(c.ctx(), ext.target()) {
                    true => c.value(w).unwrap_or_else(|e| OracleValue::Undecided(e.to_string())),
                    false => OracleValue::Undecided("other ring".into()),
                })
                .collect()
        })
        .collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in (0..candidates.len()).filter(|&i| results[i].restricts()) {
        let same = classes.iter_mut().find(|cl| !table.iter().any(|row| differ(&row[cl[0]], &row[i], grp)));
        match same {
            Some(cl) => cl.push(i),
            None => classes.push(vec![i]),
        }
    }
    let witnesses = wit_elems.iter().zip(&table).map(|(w, row)| (w.to_string(), row.iter().map(show).collect())).collect();
    Ok(SplittingReport { candidates: results, classes, witnesses })
}
