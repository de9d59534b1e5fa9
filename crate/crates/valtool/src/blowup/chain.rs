use std::fmt;

use super::{free_transform, BlowupError, TransformMap};
use crate::arith::{GroupIndex, Value};
use crate::genseq::{validate_sequence, GenSeq, ValidationReport};

/// Invariants of target level `level` against source level `level + 1`.
#[derive(Clone, Debug)]
pub struct ShiftRow {
    pub level: usize,
    pub beta: Value,
    pub nbar: (GroupIndex, GroupIndex),
    pub d: (Option<u32>, Option<u32>),
    pub n: (Option<u32>, Option<u32>),
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub source: GenSeq,
    pub map: TransformMap,
    pub target: GenSeq,
    pub table: Vec<ShiftRow>,
    /// `[target residue field : source residue field]` and `d_1` of the source.
    pub residue_degree: (usize, Option<u32>),
    pub validation: ValidationReport,
}

impl ChainStep {
    fn new(source: &GenSeq, map: TransformMap, target: GenSeq) -> Result<ChainStep, BlowupError> {
        let mut table = Vec::new();
        for i in 1..=target.top() {
            let nbar = (target.nbar(i), source.nbar(i + 1));
            let d = (target.d(i), source.d(i + 1));
            let n = (target.n(i), source.n(i + 1));
            let holds = nbar.0 == nbar.1 && d.0 == d.1 && n.0 == n.1;
            table.push(ShiftRow { level: i, beta: target.beta(i).clone(), nbar, d, n, holds });
        }
        let dt = target.ctx().residue().dimension(target.tower())?;
        let ds = source.ctx().residue().dimension(source.tower())?;
        let validation = validate_sequence(&target)?;
        Ok(ChainStep { source: source.clone(), map, target, table, residue_degree: (dt / ds, source.d(1)), validation })
    }

    pub fn holds(&self) -> bool {
        self.table.iter().all(|r| r.holds)
            && self.residue_degree.1 == Some(self.residue_degree.0 as u32)
            && self.validation.passed()
    }
}

#[derive(Clone, Debug, Default)]
pub struct TransformChainRecord {
    pub steps: Vec<ChainStep>,
    pub truncated: Option<String>,
}

impl TransformChainRecord {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn holds(&self) -> bool {
        self.steps.iter().all(ChainStep::holds)
    }

    pub fn last(&self) -> Option<&GenSeq> {
        self.steps.last().map(|s| &s.target)
    }
}

/// Applies `count` free transforms in a row, stopping early when keys run
/// out.
pub fn iterate_transforms(g: &GenSeq, count: usize) -> TransformChainRecord {
    let mut rec = TransformChainRecord::default();
    let mut cur = g.clone();
    for _ in 0..count {
        let step = free_transform(&cur).and_then(|(m, t)| ChainStep::new(&cur, m, t));
        match step {
            Ok(s) => {
                cur = s.target.clone();
                rec.steps.push(s);
            }
            Err(e) => {
                rec.truncated = Some(match e {
                    BlowupError::InsufficientKeys(_) => "insufficient keys".to_string(),
                    e => e.to_string(),
                });
                break;
            }
        }
    }
    rec
}

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "?".into())
}

impl fmt::Display for TransformChainRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            let m = &s.map;
            let [(xa, xb), (ya, yb)] = m.forward();
            let p = m.source().params();
            let q = m.chart().params();
            writeln!(
                f,
                "step {}: {} = {}^{xa}·{}^{xb}, {} = {}^{ya}·{}^{yb}  (a={}, b={}, ε={:+}, w={}, n̄={}), {} = {} − {}",
                k + 1,
                q[0],
                p[0],
                p[1],
                q[1],
                p[0],
                p[1],
                m.a,
                m.b,
                m.eps,
                m.w,
                m.nbar,
                m.target().params()[1],
                q[1],
                m.center
            )?;
            writeln!(f, "  level  beta      nbar(t/s)  d(t/s)  n(t/s)  ok")?;
            for r in &s.table {
                writeln!(
                    f,
                    "  {:<5}  {:<8}  {}/{}        {}/{}     {}/{}     {}",
                    r.level,
                    r.beta.to_string(),
                    r.nbar.0,
                    r.nbar.1,
                    opt(&r.d.0),
                    opt(&r.d.1),
                    opt(&r.n.0),
                    opt(&r.n.1),
                    if r.holds { "yes" } else { "NO" }
                )?;
            }
            writeln!(f, "  residue degree {} (d_1 = {})", s.residue_degree.0, opt(&s.residue_degree.1))?;
        }
        if let Some(t) = &self.truncated {
            writeln!(f, "truncated after {} step(s): {t}", self.steps.len())?;
        }
        Ok(())
    }
}
