//! Elements of two-dimensional regular local rings, modeled as bivariate
//! polynomials over a residue tower, and the truncated-series oracle.

mod monomial;
mod parse;
mod series;

pub use monomial::{monomialize_images, MonomialCheck, MonomialForm};
pub use parse::{parse_formal, parse_rational, FormalPoly, ParseError};
pub use series::{series_value, SeriesEmbedding, SeriesValue, TruncSeries};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{ArithError, ResidueTower, Subfield, TowerElem, Value};

#[derive(Debug, Clone, Error)]
pub enum RingError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("not regular after substitution: exponent {0:?} survives")]
    NotRegular((i64, i64)),
    #[error("parameter names must be distinct, got {0} twice")]
    DuplicateParam(String),
    #[error("elements belong to different rings ({0} and {1})")]
    ContextMismatch(String, String),
    #[error("coefficient {0} lies outside the residue field of ring {1}")]
    CoefficientOutsideResidue(String, String),
    #[error("zero element has no value")]
    ZeroElement,
    #[error("bad series embedding: {0}")]
    BadEmbedding(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
}

/// Context of a two-dimensional regular local ring.
#[derive(Debug)]
pub struct LocalRingCtx {
    name: String,
    tower: Arc<ResidueTower>,
    residue: Subfield,
    params: [String; 2],
    provenance: Vec<String>,
}

impl LocalRingCtx {
    pub fn new(name: &str, tower: &Arc<ResidueTower>, params: [&str; 2]) -> Result<Arc<Self>, RingError> {
        let k = tower.num_levels();
        Self::with_residue(name, tower, Subfield::prefix(k), params, Vec::new())
    }

    pub fn with_residue(
        name: &str,
        tower: &Arc<ResidueTower>,
        residue: Subfield,
        params: [&str; 2],
        provenance: Vec<String>,
    ) -> Result<Arc<Self>, RingError> {
        if params[0] == params[1] {
            return Err(RingError::DuplicateParam(params[0].to_string()));
        }
        residue.dimension(tower)?;
        Ok(Arc::new(LocalRingCtx {
            name: name.to_string(),
            tower: tower.clone(),
            residue,
            params: [params[0].to_string(), params[1].to_string()],
            provenance,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tower(&self) -> &Arc<ResidueTower> {
        &self.tower
    }

    /// The residue field R/m_R as a subfield of the tower.
    pub fn residue(&self) -> &Subfield {
        &self.residue
    }

    pub fn params(&self) -> [&str; 2] {
        [&self.params[0], &self.params[1]]
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b)
    }
}

#[derive(Clone)]
pub struct RingElem {
    ctx: Arc<LocalRingCtx>,
    terms: BTreeMap<(u32, u32), TowerElem>,
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem({self})")
    }
}

impl PartialEq for RingElem {
    fn eq(&self, o: &RingElem) -> bool {
        self.terms == o.terms
    }
}

impl RingElem {
    pub fn zero(ctx: &Arc<LocalRingCtx>) -> RingElem {
        RingElem { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(ctx: &Arc<LocalRingCtx>, i: u32, j: u32, c: TowerElem) -> RingElem {
        let mut r = RingElem::zero(ctx);
        if !c.is_zero() {
            let c = c.embed(ctx.tower()).expect("coefficient outside the ring's tower");
            r.terms.insert((i, j), c);
        }
        r
    }

    pub fn constant(ctx: &Arc<LocalRingCtx>, c: TowerElem) -> RingElem {
        RingElem::monomial(ctx, 0, 0, c)
    }

    pub fn from_int(ctx: &Arc<LocalRingCtx>, n: i64) -> RingElem {
        RingElem::constant(ctx, TowerElem::from_int(ctx.tower(), n))
    }

    pub fn one(ctx: &Arc<LocalRingCtx>) -> RingElem {
        RingElem::from_int(ctx, 1)
    }

    pub fn x(ctx: &Arc<LocalRingCtx>) -> RingElem {
        RingElem::monomial(ctx, 1, 0, TowerElem::one(ctx.tower()))
    }

    pub fn y(ctx: &Arc<LocalRingCtx>) -> RingElem {
        RingElem::monomial(ctx, 0, 1, TowerElem::one(ctx.tower()))
    }

    pub fn param(ctx: &Arc<LocalRingCtx>, k: usize) -> RingElem {
        if k == 0 {
            RingElem::x(ctx)
        } else {
            RingElem::y(ctx)
        }
    }

    pub fn from_terms(
        ctx: &Arc<LocalRingCtx>,
        terms: impl IntoIterator<Item = ((u32, u32), TowerElem)>,
    ) -> RingElem {
        let mut r = RingElem::zero(ctx);
        for ((i, j), c) in terms {
            r.add_term(i, j, &c);
        }
        r
    }

    /// Parses infix text in the ring's parameter names and tower generators.
    pub fn parse(ctx: &Arc<LocalRingCtx>, text: &str) -> Result<RingElem, RingError> {
        let p = parse_formal(text, &ctx.params(), ctx.tower())?;
        let r = RingElem::from_terms(ctx, p.terms().iter().map(|(e, c)| ((e[0], e[1]), c.clone())));
        r.check_residue()?;
        Ok(r)
    }

    /// Errors when a coefficient lies outside R/m_R.
    pub fn check_residue(&self) -> Result<(), RingError> {
        for c in self.terms.values() {
            if !self.ctx.residue().contains(c)? {
                return Err(RingError::CoefficientOutsideResidue(c.to_string(), self.ctx.name.clone()));
            }
        }
        Ok(())
    }

    fn add_term(&mut self, i: u32, j: u32, c: &TowerElem) {
        if c.is_zero() {
            return;
        }
        let c = c.embed(self.ctx.tower()).expect("coefficient outside the ring's tower");
        match self.terms.get_mut(&(i, j)) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&(i, j));
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert((i, j), c);
            }
        }
    }

    pub fn ctx(&self) -> &Arc<LocalRingCtx> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), TowerElem> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> TowerElem {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(|| TowerElem::zero(self.ctx.tower()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.terms.contains_key(&(0, 0))
    }

    pub fn in_max_ideal(&self) -> bool {
        !self.is_unit()
    }

    pub fn constant_term(&self) -> TowerElem {
        self.coeff(0, 0)
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    /// Least `j` with a nonzero coefficient at `(0, j)`; `None` when x divides f.
    pub fn order_mod_x(&self) -> Option<u32> {
        self.terms.keys().filter(|k| k.0 == 0).map(|k| k.1).min()
    }

    /// Largest power of x dividing f; `None` for zero.
    pub fn x_order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn y_order(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).min()
    }

    /// Exact division by `x^a y^b`; panics when not divisible.
    pub fn div_monomial(&self, a: u32, b: u32) -> RingElem {
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| ((i.checked_sub(a).unwrap(), j.checked_sub(b).unwrap()), c.clone()))
            .collect();
        RingElem { ctx: self.ctx.clone(), terms }
    }

    pub fn mul_monomial(&self, a: u32, b: u32) -> RingElem {
        let terms = self.terms.iter().map(|(&(i, j), c)| ((i + a, j + b), c.clone())).collect();
        RingElem { ctx: self.ctx.clone(), terms }
    }

    pub fn scale(&self, k: &TowerElem) -> RingElem {
        let mut r = RingElem::zero(&self.ctx);
        for (&(i, j), c) in &self.terms {
            r.add_term(i, j, &(c * k));
        }
        r
    }

    pub fn pow(&self, e: u32) -> RingElem {
        let mut acc = RingElem::one(&self.ctx);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    fn by_y(&self) -> Vec<BTreeMap<u32, TowerElem>> {
        let mut out = vec![BTreeMap::new(); self.deg_y().map_or(0, |d| d as usize + 1)];
        for (&(i, j), c) in &self.terms {
            out[j as usize].insert(i, c.clone());
        }
        out
    }

    /// Division by a polynomial monic in y: `self = q·d + r` with `deg_y r < deg_y d`.
    pub fn divrem_monic_y(&self, d: &RingElem) -> (RingElem, RingElem) {
        let dd = d.deg_y().expect("division by zero");
        let db = d.by_y();
        assert!(
            db[dd as usize].len() == 1 && db[dd as usize].get(&0).is_some_and(|c| c.is_one()),
            "divisor is not monic in y"
        );
        let mut r = self.by_y();
        let mut q = RingElem::zero(&self.ctx);
        let tower = self.ctx.tower().clone();
        for m in (dd as usize..r.len()).rev() {
            let c = std::mem::take(&mut r[m]);
            if c.is_empty() {
                continue;
            }
            let shift = m - dd as usize;
            for (&i, ci) in &c {
                q.add_term(i, shift as u32, ci);
            }
            for (k, dk) in db.iter().enumerate().take(dd as usize) {
                for (&a, ca) in dk {
                    for (&i, ci) in &c {
                        let slot = r[k + shift].entry(a + i).or_insert_with(|| TowerElem::zero(&tower));
                        *slot = &*slot - &(ca * ci);
                    }
                }
            }
        }
        let rem = RingElem::from_terms(
            &self.ctx,
            r.into_iter()
                .enumerate()
                .flat_map(|(j, row)| row.into_iter().map(move |(i, c)| ((i, j as u32), c))),
        );
        (q, rem)
    }

    /// Polynomial substitution of the parameters by `images`.
    pub fn substitute(&self, images: &[RingElem; 2]) -> RingElem {
        let target = images[0].ctx.clone();
        assert!(Arc::ptr_eq(&target, &images[1].ctx), "images in different rings");
        let (mx, my) = (self.deg_x().unwrap_or(0), self.deg_y().unwrap_or(0));
        let xp = powers(&images[0], mx, |a, b| a * b, RingElem::one(&target));
        let yp = powers(&images[1], my, |a, b| a * b, RingElem::one(&target));
        let mut out = RingElem::zero(&target);
        for (&(i, j), c) in &self.terms {
            let t = (&xp[i as usize] * &yp[j as usize]).scale(c);
            out = &out + &t;
        }
        out
    }

    /// Substitution by Laurent polynomials.
    pub fn substitute_laurent(&self, images: &[LaurentPoly; 2]) -> LaurentPoly {
        let tower = images[0].tower.clone();
        let (mx, my) = (self.deg_x().unwrap_or(0), self.deg_y().unwrap_or(0));
        let one = LaurentPoly::constant(&tower, TowerElem::one(&tower));
        let xp = powers(&images[0], mx, |a, b| a.mul(b), one.clone());
        let yp = powers(&images[1], my, |a, b| a.mul(b), one);
        let mut out = LaurentPoly::zero(&tower);
        for (&(i, j), c) in &self.terms {
            out = out.add(&xp[i as usize].mul(&yp[j as usize]).scale(c));
        }
        out
    }

    pub fn to_laurent(&self) -> LaurentPoly {
        let mut l = LaurentPoly::zero(self.ctx.tower());
        for (&(i, j), c) in &self.terms {
            l.add_term(i as i64, j as i64, c);
        }
        l
    }
}

fn powers<T: Clone>(b: &T, n: u32, mul: impl Fn(&T, &T) -> T, one: T) -> Vec<T> {
    let mut out = vec![one];
    for k in 0..n as usize {
        let next = mul(&out[k], b);
        out.push(next);
    }
    out
}

fn fmt_coeff(c: &TowerElem, mono: &str, first: bool, out: &mut String) {
    let s = c.to_string();
    let compound = s[1..].contains(" + ") || s[1..].contains(" - ");
    let (neg, body) = if !compound && s.starts_with('-') { (true, &s[1..]) } else { (false, s.as_str()) };
    let body = if compound { format!("({body})") } else { body.to_string() };
    let term = if mono.is_empty() {
        body
    } else if body == "1" {
        mono.to_string()
    } else {
        format!("{body}*{mono}")
    };
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    out.push_str(&term);
}

fn mono_name(names: [&str; 2], i: i64, j: i64) -> String {
    let mut parts = Vec::new();
    for (n, e) in [(names[0], i), (names[1], j)] {
        match e {
            0 => {}
            1 => parts.push(n.to_string()),
            _ => parts.push(format!("{n}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|a, b| (b.1, b.0).cmp(&(a.1, a.0)));
        let mut out = String::new();
        for (n, k) in keys.into_iter().enumerate() {
            let m = mono_name(self.ctx.params(), k.0 as i64, k.1 as i64);
            fmt_coeff(&self.terms[k], &m, n == 0, &mut out);
        }
        f.write_str(&out)
    }
}

fn check_ctx(a: &RingElem, b: &RingElem) {
    if !Arc::ptr_eq(&a.ctx, &b.ctx) {
        panic!("{}", RingError::ContextMismatch(a.ctx.name.clone(), b.ctx.name.clone()));
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, o: &RingElem) -> RingElem {
        check_ctx(self, o);
        let mut r = self.clone();
        for (&(i, j), c) in &o.terms {
            r.add_term(i, j, c);
        }
        r
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, o: &RingElem) -> RingElem {
        check_ctx(self, o);
        let mut r = self.clone();
        for (&(i, j), c) in &o.terms {
            r.add_term(i, j, &-c);
        }
        r
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, o: &RingElem) -> RingElem {
        check_ctx(self, o);
        let mut r = RingElem::zero(&self.ctx);
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &o.terms {
                r.add_term(i + k, j + l, &(c * d));
            }
        }
        r
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        let terms = self.terms.iter().map(|(k, c)| (*k, -c)).collect();
        RingElem { ctx: self.ctx.clone(), terms }
    }
}

macro_rules! owned_ring_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RingElem {
            type Output = RingElem;
            fn $m(self, o: RingElem) -> RingElem { (&self).$m(&o) }
        }
    )*};
}
owned_ring_ops!(Add add, Sub sub, Mul mul);

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

/// Laurent polynomial in two variables, used for transforms and pullbacks.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    tower: Arc<ResidueTower>,
    terms: BTreeMap<(i64, i64), TowerElem>,
}

impl LaurentPoly {
    pub fn zero(t: &Arc<ResidueTower>) -> LaurentPoly {
        LaurentPoly { tower: t.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(t: &Arc<ResidueTower>, i: i64, j: i64, c: TowerElem) -> LaurentPoly {
        let mut l = LaurentPoly::zero(t);
        l.add_term(i, j, &c);
        l
    }

    pub fn constant(t: &Arc<ResidueTower>, c: TowerElem) -> LaurentPoly {
        LaurentPoly::monomial(t, 0, 0, c)
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), TowerElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, i: i64, j: i64, c: &TowerElem) {
        if c.is_zero() {
            return;
        }
        let c = c.embed(&self.tower).expect("coefficient outside the tower");
        match self.terms.get_mut(&(i, j)) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&(i, j));
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert((i, j), c);
            }
        }
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (&(i, j), c) in &o.terms {
            r.add_term(i, j, c);
        }
        r
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = LaurentPoly::zero(&self.tower);
        for (&(i, j), c) in &self.terms {
            for (&(k, l), d) in &o.terms {
                r.add_term(i + k, j + l, &(c * d));
            }
        }
        r
    }

    pub fn scale(&self, k: &TowerElem) -> LaurentPoly {
        let mut r = LaurentPoly::zero(&self.tower);
        for (&(i, j), c) in &self.terms {
            r.add_term(i, j, &(c * k));
        }
        r
    }

    pub fn shift(&self, a: i64, b: i64) -> LaurentPoly {
        let terms = self.terms.iter().map(|(&(i, j), c)| ((i + a, j + b), c.clone())).collect();
        LaurentPoly { tower: self.tower.clone(), terms }
    }

    pub fn min_exponents(&self) -> (i64, i64) {
        let a = self.terms.keys().map(|k| k.0).min().unwrap_or(0);
        let b = self.terms.keys().map(|k| k.1).min().unwrap_or(0);
        (a, b)
    }

    /// The polynomial this Laurent polynomial already is.
    pub fn to_ring(&self, ctx: &Arc<LocalRingCtx>) -> Result<RingElem, RingError> {
        let mut r = RingElem::zero(ctx);
        for (&(i, j), c) in &self.terms {
            if i < 0 || j < 0 {
                return Err(RingError::NotRegular((i, j)));
            }
            r.add_term(i as u32, j as u32, c);
        }
        Ok(r)
    }

    /// Multiplies by the least `x^A y^B` (`A, B ≥ 0`) giving a polynomial.
    pub fn clear(&self, ctx: &Arc<LocalRingCtx>) -> (RingElem, (u32, u32)) {
        let (a, b) = self.min_exponents();
        let (sa, sb) = ((-a).max(0), (-b).max(0));
        let r = self.shift(sa, sb).to_ring(ctx).expect("shifted polynomial");
        (r, (sa as u32, sb as u32))
    }
}

/// Outcome of asking a valuation for the value of an element.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleValue {
    Exact(Value),
    /// Cancellation beyond the available data; the value is at least this.
    AtLeast(Value),
    Undecided(String),
}

impl OracleValue {
    pub fn exact(&self) -> Option<&Value> {
        match self {
            OracleValue::Exact(v) => Some(v),
            _ => None,
        }
    }
}

/// Anything that can value ring elements and take residues of ratios of
/// equal-value elements.
pub trait ValuationOracle {
    fn oracle_value(&self, f: &RingElem) -> Result<OracleValue, RingError>;
    /// `[num/den]` when both have the same decided value.
    fn oracle_residue(&self, num: &RingElem, den: &RingElem) -> Result<Option<TowerElem>, RingError>;
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> Arc<LocalRingCtx> {
        LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap()
    }

    fn p(c: &Arc<LocalRingCtx>, s: &str) -> RingElem {
        RingElem::parse(c, s).unwrap()
    }

    #[test]
    fn substitution_example() {
        let r = ctx();
        let t = LocalRingCtx::new("T", &ResidueTower::rational(), ["x1", "y1"]).unwrap();
        let f = p(&r, "y^2 - x^3");
        let img = [p(&t, "x1^2*y1"), p(&t, "x1^3*y1^2")];
        assert_eq!(f.substitute(&img), p(&t, "x1^6*y1^4 - x1^6*y1^3"));
        assert_eq!(f.substitute(&img).to_string(), "x1^6*y1^4 - x1^6*y1^3");
        let id = [RingElem::x(&r), RingElem::y(&r)];
        assert_eq!(RingElem::x(&r).substitute(&id), RingElem::x(&r));
    }

    #[test]
    fn order_mod_x_examples() {
        let r = ctx();
        assert_eq!(p(&r, "y^2").order_mod_x(), Some(2));
        assert_eq!(p(&r, "x*y").order_mod_x(), None);
        assert_eq!(p(&r, "x^3 + y^5").order_mod_x(), Some(5));
    }

    #[test]
    fn monic_division() {
        let r = ctx();
        let f = p(&r, "y^2 + x^3");
        let d = p(&r, "y^2 - x^3");
        let (q, rem) = f.divrem_monic_y(&d);
        assert_eq!(q, RingElem::one(&r));
        assert_eq!(rem, p(&r, "2*x^3"));
        let f = p(&r, "y^5 + x*y^3 - 7*x^2*y + 1");
        let (q, rem) = f.divrem_monic_y(&d);
        assert_eq!(&(&q * &d) + &rem, f);
        assert!(rem.deg_y().unwrap() < 2);
    }

    #[test]
    fn laurent_clearing() {
        let r = ctx();
        let t = r.tower().clone();
        let one = TowerElem::one(&t);
        let img = [
            LaurentPoly::monomial(&t, 2, -1, one.clone()),
            LaurentPoly::monomial(&t, -3, 2, one.clone()),
        ];
        let f = p(&r, "x + y");
        let l = f.substitute_laurent(&img);
        assert!(matches!(l.to_ring(&r), Err(RingError::NotRegular(_))));
        let (g, (a, b)) = l.clear(&r);
        assert_eq!((a, b), (3, 1));
        assert_eq!(g, p(&r, "x^5 + y^3"));
    }

    fn arb_poly() -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
        proptest::collection::vec((0u32..4, 0u32..4, -3i64..4), 0..6)
    }

    fn build(c: &Arc<LocalRingCtx>, t: &[(u32, u32, i64)]) -> RingElem {
        RingElem::from_terms(c, t.iter().map(|&(i, j, k)| ((i, j), TowerElem::from_int(c.tower(), k))))
    }

    fn arb_small() -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
        proptest::collection::vec((0u32..3, 0u32..3, -2i64..3), 0..4)
    }

    proptest! {
        #[test]
        fn substitution_is_a_ring_map(a in arb_poly(), b in arb_poly(), u in arb_poly(), v in arb_poly()) {
            let r = ctx();
            let (f, g) = (build(&r, &a), build(&r, &b));
            let img = [build(&r, &u), build(&r, &v)];
            prop_assert_eq!((&f + &g).substitute(&img), &f.substitute(&img) + &g.substitute(&img));
            prop_assert_eq!((&f * &g).substitute(&img), &f.substitute(&img) * &g.substitute(&img));
        }

        #[test]
        fn substitution_composes(a in arb_small(), u in arb_small(), v in arb_small(), s in arb_small(), w in arb_small()) {
            let r = ctx();
            let f = build(&r, &a);
            let g = [build(&r, &u), build(&r, &v)];
            let h = [build(&r, &s), build(&r, &w)];
            let gh = [g[0].substitute(&h), g[1].substitute(&h)];
            prop_assert_eq!(f.substitute(&g).substitute(&h), f.substitute(&gh));
        }

        #[test]
        fn order_mod_x_additive(a in arb_poly(), b in arb_poly()) {
            let r = ctx();
            let (f, g) = (build(&r, &a), build(&r, &b));
            if let (Some(m), Some(n)) = (f.order_mod_x(), g.order_mod_x()) {
                prop_assert_eq!((&f * &g).order_mod_x(), Some(m + n));
            }
        }
    }
}
