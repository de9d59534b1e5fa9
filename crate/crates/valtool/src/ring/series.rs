//! Truncated series in `t^{1/m}` and the brute-force valuation oracle.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use super::{LocalRingCtx, OracleValue, RingElem, RingError, ValuationOracle};
use crate::arith::{Rat, ResidueTower, TowerElem, Value};

/// Series known exactly for exponents below `precision` (all exponents in
/// units of `1/m`); `None` precision means exact.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries {
    tower: Arc<ResidueTower>,
    terms: BTreeMap<i64, TowerElem>,
    precision: Option<i64>,
}

impl TruncSeries {
    pub fn new(
        tower: &Arc<ResidueTower>,
        terms: impl IntoIterator<Item = (i64, TowerElem)>,
        precision: Option<i64>,
    ) -> TruncSeries {
        let mut s = TruncSeries { tower: tower.clone(), terms: BTreeMap::new(), precision };
        for (e, c) in terms {
            s.add_term(e, &c);
        }
        s.truncate();
        s
    }

    pub fn constant(tower: &Arc<ResidueTower>, c: TowerElem) -> TruncSeries {
        TruncSeries::new(tower, [(0, c)], None)
    }

    fn add_term(&mut self, e: i64, c: &TowerElem) {
        if c.is_zero() {
            return;
        }
        let c = c.embed(&self.tower).expect("coefficient outside the tower");
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn truncate(&mut self) {
        if let Some(n) = self.precision {
            self.terms.retain(|e, _| *e < n);
        }
    }

    pub fn precision(&self) -> Option<i64> {
        self.precision
    }

    pub fn terms(&self) -> &BTreeMap<i64, TowerElem> {
        &self.terms
    }

    /// Leading exponent and coefficient among the known terms.
    pub fn leading(&self) -> Option<(i64, &TowerElem)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    /// Lower bound for the order: the leading exponent, or the precision
    /// when nothing is known.
    fn order_bound(&self) -> Option<i64> {
        self.leading().map(|l| l.0).or(self.precision)
    }

    pub fn add(&self, o: &TruncSeries) -> TruncSeries {
        let precision = match (self.precision, o.precision) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut r = TruncSeries { tower: self.tower.clone(), terms: self.terms.clone(), precision };
        for (e, c) in &o.terms {
            r.add_term(*e, c);
        }
        r.truncate();
        r
    }

    pub fn scale(&self, k: &TowerElem) -> TruncSeries {
        let mut r = TruncSeries { tower: self.tower.clone(), terms: BTreeMap::new(), precision: self.precision };
        for (e, c) in &self.terms {
            r.add_term(*e, &(c * k));
        }
        r
    }

    pub fn mul(&self, o: &TruncSeries) -> TruncSeries {
        let cand = |n: Option<i64>, v: Option<i64>| match (n, v) {
            (Some(n), Some(v)) => Some(n + v),
            (Some(n), None) => Some(n),
            _ => None,
        };
        let precision = match (cand(self.precision, o.order_bound()), cand(o.precision, self.order_bound())) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut r = TruncSeries { tower: self.tower.clone(), terms: BTreeMap::new(), precision };
        for (e, c) in &self.terms {
            for (f, d) in &o.terms {
                if precision.is_some_and(|n| e + f >= n) {
                    continue;
                }
                r.add_term(e + f, &(c * d));
            }
        }
        r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeriesValue {
    Value(Value),
    InsufficientPrecision { at_least: Value },
}

impl SeriesValue {
    pub fn value(&self) -> Option<&Value> {
        match self {
            SeriesValue::Value(v) => Some(v),
            SeriesValue::InsufficientPrecision { .. } => None,
        }
    }
}

/// Parameters mapped to truncated series; values are normalized by a
/// declared unit such as `ν(x) = 1`.
#[derive(Clone, Debug)]
pub struct SeriesEmbedding {
    ctx: Arc<LocalRingCtx>,
    ramification: u32,
    images: [TruncSeries; 2],
    scale: Rat,
}

impl SeriesEmbedding {
    /// `unit = (k, v)` declares that parameter `k` has value `v`.
    pub fn new(
        ctx: &Arc<LocalRingCtx>,
        ramification: u32,
        images: [TruncSeries; 2],
        unit: (usize, Rat),
    ) -> Result<SeriesEmbedding, RingError> {
        if ramification == 0 {
            return Err(RingError::BadEmbedding("ramification must be positive".into()));
        }
        for (k, s) in images.iter().enumerate() {
            match s.leading() {
                Some((e, _)) if e > 0 => {}
                Some(_) => {
                    return Err(RingError::BadEmbedding(format!(
                        "image of {} is a unit; the embedding must dominate the ring",
                        ctx.params()[k]
                    )))
                }
                None => {
                    return Err(RingError::BadEmbedding(format!(
                        "image of {} has no known leading term",
                        ctx.params()[k]
                    )))
                }
            }
        }
        let lead = images[unit.0].leading().unwrap().0;
        if unit.1 <= Rat::zero() {
            return Err(RingError::BadEmbedding("declared unit value must be positive".into()));
        }
        let scale = unit.1 / Rat::from_integer(lead.into());
        Ok(SeriesEmbedding { ctx: ctx.clone(), ramification, images, scale })
    }

    pub fn ctx(&self) -> &Arc<LocalRingCtx> {
        &self.ctx
    }

    pub fn ramification(&self) -> u32 {
        self.ramification
    }

    pub fn images(&self) -> &[TruncSeries; 2] {
        &self.images
    }

    pub fn image(&self, f: &RingElem) -> TruncSeries {
        let t = self.images[0].tower.clone();
        let one = TruncSeries::constant(&t, TowerElem::one(&t));
        let pw = |s: &TruncSeries, n: u32| {
            let mut v = vec![one.clone()];
            for k in 0..n as usize {
                let next = v[k].mul(s);
                v.push(next);
            }
            v
        };
        let xp = pw(&self.images[0], f.deg_x().unwrap_or(0));
        let yp = pw(&self.images[1], f.deg_y().unwrap_or(0));
        let mut acc = TruncSeries::new(&t, [], None);
        for (&(i, j), c) in f.terms() {
            acc = acc.add(&xp[i as usize].mul(&yp[j as usize]).scale(c));
        }
        acc
    }

    pub fn exponent_value(&self, e: i64) -> Value {
        Value::rational(&self.scale * Rat::from_integer(e.into()))
    }

    pub fn value(&self, f: &RingElem) -> Result<SeriesValue, RingError> {
        if f.is_zero() {
            return Err(RingError::ZeroElement);
        }
        let s = self.image(f);
        Ok(match s.leading() {
            Some((e, _)) => SeriesValue::Value(self.exponent_value(e)),
            None => SeriesValue::InsufficientPrecision {
                at_least: self.exponent_value(s.precision.expect("exact image of a nonzero polynomial vanished")),
            },
        })
    }

    /// Leading-coefficient ratio when both images have the same known order.
    pub fn residue_ratio(&self, num: &RingElem, den: &RingElem) -> Option<TowerElem> {
        let (a, b) = (self.image(num), self.image(den));
        let ((ea, ca), (eb, cb)) = (a.leading()?, b.leading()?);
        if ea != eb {
            return None;
        }
        ca.div(cb).ok()
    }
}

pub fn series_value(f: &RingElem, emb: &SeriesEmbedding) -> Result<SeriesValue, RingError> {
    emb.value(f)
}

impl ValuationOracle for SeriesEmbedding {
    fn oracle_value(&self, f: &RingElem) -> Result<OracleValue, RingError> {
        Ok(match self.value(f)? {
            SeriesValue::Value(v) => OracleValue::Exact(v),
            SeriesValue::InsufficientPrecision { at_least } => OracleValue::AtLeast(at_least),
        })
    }

    fn oracle_residue(&self, num: &RingElem, den: &RingElem) -> Result<Option<TowerElem>, RingError> {
        Ok(self.residue_ratio(num, den))
    }
}
