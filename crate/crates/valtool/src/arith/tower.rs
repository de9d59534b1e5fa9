//! Towers of simple extensions over ℚ or 𝔽_p.
//!
//! An element is a flat coefficient vector in the mixed-radix monomial basis
//! `g_1^{e_1}⋯g_k^{e_k}` with `e_j < deg_j`; the last level is the most
//! significant digit, so embedding into a taller tower is zero padding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::{ArithError, Rat, Span};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseField {
    Rational,
    Prime(u64),
}

impl BaseField {
    pub fn prime(p: u64) -> Result<BaseField, ArithError> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(ArithError::NotPrime(p));
        }
        Ok(BaseField::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            BaseField::Rational => 0,
            BaseField::Prime(p) => *p,
        }
    }

    fn reduce_int(&self, n: &BigInt) -> Rat {
        match self {
            BaseField::Rational => Rat::from_integer(n.clone()),
            BaseField::Prime(p) => Rat::from_integer(n.mod_floor(&BigInt::from(*p))),
        }
    }

    /// Image of a rational number; fails when the denominator vanishes mod p.
    pub fn from_rat(&self, r: &Rat) -> Result<Rat, ArithError> {
        match self {
            BaseField::Rational => Ok(r.clone()),
            BaseField::Prime(p) => {
                let pb = BigInt::from(*p);
                let d = r.denom().mod_floor(&pb);
                if d.is_zero() {
                    return Err(ArithError::NotInField(r.to_string(), *p));
                }
                let inv = d.extended_gcd(&pb).x;
                Ok(self.reduce_int(&(r.numer() * inv)))
            }
        }
    }

    pub(crate) fn add(&self, a: &Rat, b: &Rat) -> Rat {
        match self {
            BaseField::Rational => a + b,
            BaseField::Prime(_) => self.reduce_int(&(a.numer() + b.numer())),
        }
    }

    pub(crate) fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        match self {
            BaseField::Rational => a - b,
            BaseField::Prime(_) => self.reduce_int(&(a.numer() - b.numer())),
        }
    }

    pub(crate) fn neg(&self, a: &Rat) -> Rat {
        match self {
            BaseField::Rational => -a,
            BaseField::Prime(_) => self.reduce_int(&-a.numer()),
        }
    }

    pub(crate) fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        match self {
            BaseField::Rational => a * b,
            BaseField::Prime(_) => self.reduce_int(&(a.numer() * b.numer())),
        }
    }

    pub(crate) fn inv(&self, a: &Rat) -> Rat {
        match self {
            BaseField::Rational => a.recip(),
            BaseField::Prime(p) => {
                let pb = BigInt::from(*p);
                self.reduce_int(&a.numer().extended_gcd(&pb).x)
            }
        }
    }

    /// All field elements, for exhaustive searches over small prime fields.
    fn elements(&self) -> Vec<Rat> {
        match self {
            BaseField::Rational => Vec::new(),
            BaseField::Prime(p) => (0..*p).map(|k| Rat::from_integer(BigInt::from(k))).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Proven,
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerLevel {
    pub name: String,
    pub degree: usize,
    /// `c_0..c_{deg-1}` of the monic minimal polynomial, each flat at the previous level.
    minpoly: Vec<Vec<Rat>>,
    pub irreducibility: Irreducibility,
}

#[derive(Debug, PartialEq, Eq)]
pub struct ResidueTower {
    base: BaseField,
    levels: Vec<TowerLevel>,
    dims: Vec<usize>,
}

/// Searches above this many candidates fall back to "assumed".
const SEARCH_CAP: u64 = 200_000;

impl ResidueTower {
    pub fn new(base: BaseField) -> Arc<ResidueTower> {
        Arc::new(ResidueTower { base, levels: Vec::new(), dims: vec![1] })
    }

    pub fn rational() -> Arc<ResidueTower> {
        ResidueTower::new(BaseField::Rational)
    }

    pub fn prime(p: u64) -> Result<Arc<ResidueTower>, ArithError> {
        Ok(ResidueTower::new(BaseField::prime(p)?))
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    /// Dimension over the base field.
    pub fn dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn dim_at(&self, levels: usize) -> usize {
        self.dims[levels]
    }

    pub fn level_index(&self, name: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.name == name)
    }

    pub fn is_prefix_of(&self, other: &ResidueTower) -> bool {
        self.base == other.base
            && self.levels.len() <= other.levels.len()
            && self.levels.iter().zip(&other.levels).all(|(a, b)| a == b)
    }

    pub fn prefix(&self, k: usize) -> Arc<ResidueTower> {
        Arc::new(ResidueTower {
            base: self.base.clone(),
            levels: self.levels[..k].to_vec(),
            dims: self.dims[..=k].to_vec(),
        })
    }

    pub fn assumed_levels(&self) -> Vec<&str> {
        self.levels
            .iter()
            .filter(|l| l.irreducibility == Irreducibility::Assumed)
            .map(|l| l.name.as_str())
            .collect()
    }

    pub fn minpoly(self: &Arc<Self>, level: usize) -> Vec<TowerElem> {
        let t = self.prefix(level);
        let mut out: Vec<TowerElem> =
            self.levels[level].minpoly.iter().map(|c| TowerElem::raw(&t, c.clone())).collect();
        out.push(TowerElem::one(&t));
        out
    }

    // ---- flat arithmetic at a given number of levels ----

    fn is_zero_slice(a: &[Rat]) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    fn add_at(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn sub_at(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn mul_at(&self, lv: usize, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        if lv == 0 {
            return vec![self.base.mul(&a[0], &b[0])];
        }
        let n = self.dims[lv - 1];
        let d = self.levels[lv - 1].degree;
        let zero = vec![Rat::zero(); n];
        let mut prod = vec![zero.clone(); 2 * d - 1];
        for i in 0..d {
            let ai = &a[i * n..(i + 1) * n];
            if Self::is_zero_slice(ai) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * n..(j + 1) * n];
                if Self::is_zero_slice(bj) {
                    continue;
                }
                let p = self.mul_at(lv - 1, ai, bj);
                prod[i + j] = self.add_at(&prod[i + j], &p);
            }
        }
        let m = &self.levels[lv - 1].minpoly;
        for k in (d..2 * d - 1).rev() {
            if Self::is_zero_slice(&prod[k]) {
                continue;
            }
            let c = std::mem::replace(&mut prod[k], zero.clone());
            for (j, mj) in m.iter().enumerate() {
                if Self::is_zero_slice(mj) {
                    continue;
                }
                let t = self.mul_at(lv - 1, &c, mj);
                prod[k - d + j] = self.sub_at(&prod[k - d + j], &t);
            }
        }
        prod.truncate(d);
        prod.concat()
    }

    fn inv_at(&self, lv: usize, a: &[Rat]) -> Option<Vec<Rat>> {
        if Self::is_zero_slice(a) {
            return None;
        }
        if lv == 0 {
            return Some(vec![self.base.inv(&a[0])]);
        }
        let n = self.dims[lv - 1];
        let d = self.levels[lv - 1].degree;
        let pa: Vec<Vec<Rat>> = (0..d).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
        let mut m = self.levels[lv - 1].minpoly.clone();
        let mut one = vec![Rat::zero(); n];
        one[0] = Rat::one();
        m.push(one.clone());
        let ops = PolyOps { tower: self, lv: lv - 1 };
        let (mut r0, mut r1) = (ops.trim(m), ops.trim(pa));
        let (mut s0, mut s1) = (Vec::new(), vec![one]);
        while !r1.is_empty() {
            let (q, r) = ops.divrem(&r0, &r1)?;
            let s2 = ops.sub(&s0, &ops.mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = self.inv_at(lv - 1, &r0[0])?;
        let mut out = vec![Rat::zero(); self.dims[lv]];
        for (i, si) in s0.iter().enumerate() {
            let v = self.mul_at(lv - 1, si, &c);
            out[i * n..(i + 1) * n].clone_from_slice(&v);
        }
        Some(out)
    }

    /// Every element at `lv` levels, when the tower is finite and small.
    fn enumerate(&self, lv: usize, cap: u64) -> Option<Vec<Vec<Rat>>> {
        let elems = self.base.elements();
        if elems.is_empty() {
            return None;
        }
        let n = self.dims[lv];
        let size = (elems.len() as u64).checked_pow(n as u32)?;
        if size > cap {
            return None;
        }
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<Rat>| {
                    elems.iter().map(move |e| {
                        let mut w = v.clone();
                        w.push(e.clone());
                        w
                    })
                })
                .collect();
        }
        Some(out)
    }

    /// Extends by a monic polynomial given low-to-high, leading 1 included.
    pub fn extend(
        self: &Arc<Self>,
        name: &str,
        minpoly: &[TowerElem],
    ) -> Result<Arc<ResidueTower>, ArithError> {
        if minpoly.len() < 2 {
            return Err(ArithError::MalformedMinpoly(format!("{name}: constant polynomial")));
        }
        if minpoly.len() == 2 {
            return Err(ArithError::DegreeOneAdjoin(name.to_string()));
        }
        if self.level_index(name).is_some() {
            return Err(ArithError::MalformedMinpoly(format!("{name}: generator name in use")));
        }
        let mut coeffs = Vec::new();
        for c in minpoly {
            let c = c.embed(self)?;
            coeffs.push(c.c);
        }
        let lead = coeffs.pop().unwrap();
        if !(lead[0].is_one() && lead[1..].iter().all(|x| x.is_zero())) {
            return Err(ArithError::MalformedMinpoly(format!("{name}: not monic")));
        }
        let lv = self.levels.len();
        let irreducibility = self.check_irreducible(lv, &coeffs)?;
        let mut levels = self.levels.clone();
        let degree = coeffs.len();
        levels.push(TowerLevel { name: name.to_string(), degree, minpoly: coeffs, irreducibility });
        let mut dims = self.dims.clone();
        dims.push(self.dim() * degree);
        Ok(Arc::new(ResidueTower { base: self.base.clone(), levels, dims }))
    }

    fn check_irreducible(&self, lv: usize, coeffs: &[Vec<Rat>]) -> Result<Irreducibility, ArithError> {
        let deg = coeffs.len();
        let ops = PolyOps { tower: self, lv };
        let mut poly: Vec<Vec<Rat>> = coeffs.to_vec();
        let mut one = vec![Rat::zero(); self.dims[lv]];
        one[0] = Rat::one();
        poly.push(one.clone());
        let t = Arc::new(ResidueTower {
            base: self.base.clone(),
            levels: self.levels[..lv].to_vec(),
            dims: self.dims[..=lv].to_vec(),
        });
        if let Some(all) = self.enumerate(lv, SEARCH_CAP) {
            for e in &all {
                if Self::is_zero_slice(&ops.eval(&poly, e)) {
                    return Err(ArithError::NotFieldExtension(
                        TowerElem::raw(&t, e.clone()).to_string(),
                    ));
                }
            }
            if deg <= 3 {
                return Ok(Irreducibility::Proven);
            }
            let q = all.len() as u64;
            let mut proven = true;
            for k in 2..=deg / 2 {
                if q.checked_pow(k as u32).is_none_or(|c| c > SEARCH_CAP) {
                    proven = false;
                    break;
                }
                for tail in Self::tuples(&all, k) {
                    let mut f = tail;
                    f.push(one.clone());
                    if ops.divrem(&poly, &f).is_some_and(|(_, r)| r.is_empty()) {
                        return Err(ArithError::NotFieldExtension(ops.show(&t, &f)));
                    }
                }
            }
            return Ok(if proven { Irreducibility::Proven } else { Irreducibility::Assumed });
        }
        if self.base != BaseField::Rational || coeffs.iter().any(|c| c[1..].iter().any(|x| !x.is_zero())) {
            return Ok(Irreducibility::Assumed);
        }
        let rc: Vec<Rat> = coeffs.iter().map(|c| c[0].clone()).collect();
        if let Some(r) = rational_root(&rc) {
            return Err(ArithError::NotFieldExtension(r.to_string()));
        }
        if lv > 0 {
            return Ok(Irreducibility::Assumed);
        }
        match deg {
            2 | 3 => Ok(Irreducibility::Proven),
            4 => match quadratic_factor(&rc) {
                Some(w) => Err(ArithError::NotFieldExtension(w)),
                None => Ok(Irreducibility::Proven),
            },
            _ => Ok(Irreducibility::Assumed),
        }
    }

    fn tuples(elems: &[Vec<Rat>], k: usize) -> Vec<Vec<Vec<Rat>>> {
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|v: Vec<Vec<Rat>>| {
                    elems.iter().map(move |e| {
                        let mut w = v.clone();
                        w.push(e.clone());
                        w
                    })
                })
                .collect();
        }
        out
    }
}

/// Univariate polynomials whose coefficients are flat elements at `lv` levels.
struct PolyOps<'a> {
    tower: &'a ResidueTower,
    lv: usize,
}

impl PolyOps<'_> {
    fn trim(&self, mut p: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
        while p.last().is_some_and(|c| ResidueTower::is_zero_slice(c)) {
            p.pop();
        }
        p
    }

    fn zero(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.tower.dims[self.lv]]
    }

    fn sub(&self, a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
        let n = a.len().max(b.len());
        let z = self.zero();
        let out = (0..n)
            .map(|i| self.tower.sub_at(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.trim(out)
    }

    fn mul(&self, a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let p = self.tower.mul_at(self.lv, x, y);
                out[i + j] = self.tower.add_at(&out[i + j], &p);
            }
        }
        self.trim(out)
    }

    fn divrem(&self, a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Option<(Vec<Vec<Rat>>, Vec<Vec<Rat>>)> {
        let b = self.trim(b.to_vec());
        let lead_inv = self.tower.inv_at(self.lv, b.last()?)?;
        let mut r = self.trim(a.to_vec());
        if r.len() < b.len() {
            return Some((Vec::new(), r));
        }
        let mut q = vec![self.zero(); r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = self.tower.mul_at(self.lv, r.last().unwrap(), &lead_inv);
            for (j, bj) in b.iter().enumerate() {
                let t = self.tower.mul_at(self.lv, &c, bj);
                r[shift + j] = self.tower.sub_at(&r[shift + j], &t);
            }
            q[shift] = c;
            r = self.trim(r);
        }
        Some((self.trim(q), r))
    }

    fn eval(&self, p: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
        let mut acc = self.zero();
        for c in p.iter().rev() {
            acc = self.tower.mul_at(self.lv, &acc, x);
            acc = self.tower.add_at(&acc, c);
        }
        acc
    }

    fn show(&self, t: &Arc<ResidueTower>, p: &[Vec<Rat>]) -> String {
        let terms: Vec<String> = p
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !ResidueTower::is_zero_slice(c))
            .map(|(i, c)| format!("({})*T^{}", TowerElem::raw(t, c.clone()), i))
            .collect();
        terms.join(" + ")
    }
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let m = n.to_u64()?;
    if m > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(BigInt::from(d));
            if d * d != m {
                out.push(BigInt::from(m / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Integer monic polynomial `D^n p(T/D)` from a rational monic `p`.
fn integral_monic(c: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let d = c.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let n = c.len();
    let out = c
        .iter()
        .enumerate()
        .map(|(i, x)| (x * Rat::from_integer(num::pow(d.clone(), n - i))).to_integer())
        .collect();
    (out, d)
}

/// A rational root of the monic polynomial with low-to-high coefficients `c`.
fn rational_root(c: &[Rat]) -> Option<Rat> {
    let (ic, d) = integral_monic(c);
    if ic[0].is_zero() {
        return Some(Rat::zero());
    }
    let eval = |x: &BigInt| {
        let mut acc = BigInt::one();
        for k in ic.iter().rev() {
            acc = acc * x + k;
        }
        acc
    };
    for r in divisors(&ic[0])? {
        for s in [r.clone(), -r] {
            if eval(&s).is_zero() {
                return Some(Rat::new(s, d.clone()));
            }
        }
    }
    None
}

/// Monic quadratic factor of a monic quartic, as a display string.
fn quadratic_factor(c: &[Rat]) -> Option<String> {
    let (ic, d) = integral_monic(c);
    let (c0, c1, c2, c3) = (&ic[0], &ic[1], &ic[2], &ic[3]);
    let show = |p: &BigInt, q: &BigInt| {
        format!("T^2 + {}*T + {}", Rat::new(p.clone(), d.clone()), Rat::new(q.clone(), &d * &d))
    };
    for q in divisors(c0)? {
        for q in [q.clone(), -q] {
            let qq = c0 / &q;
            if q != qq {
                let num = c1 - &q * c3;
                let den = &qq - &q;
                if !num.is_multiple_of(&den) {
                    continue;
                }
                let p = num / den;
                let pp = c3 - &p;
                if &q + &qq + &p * &pp == *c2 {
                    return Some(show(&p, &q));
                }
            } else {
                if *c1 != &q * c3 {
                    continue;
                }
                let disc = c3 * c3 - BigInt::from(4) * (c2 - BigInt::from(2) * &q);
                if disc.is_negative() {
                    continue;
                }
                let s = disc.sqrt();
                if &s * &s == disc && (c3 + &s).is_even() {
                    return Some(show(&((c3 + &s) / 2), &q));
                }
            }
        }
    }
    None
}

pub fn tower_extend(
    t: &Arc<ResidueTower>,
    name: &str,
    minpoly: &[TowerElem],
) -> Result<Arc<ResidueTower>, ArithError> {
    t.extend(name, minpoly)
}

#[derive(Clone)]
pub struct TowerElem {
    tower: Arc<ResidueTower>,
    c: Vec<Rat>,
}

impl fmt::Debug for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TowerElem({self})")
    }
}

fn unify(a: &Arc<ResidueTower>, b: &Arc<ResidueTower>) -> Result<Arc<ResidueTower>, ArithError> {
    if Arc::ptr_eq(a, b) {
        return Ok(a.clone());
    }
    if a.is_prefix_of(b) {
        Ok(b.clone())
    } else if b.is_prefix_of(a) {
        Ok(a.clone())
    } else {
        Err(ArithError::TowerMismatch)
    }
}

impl TowerElem {
    fn raw(t: &Arc<ResidueTower>, c: Vec<Rat>) -> TowerElem {
        TowerElem { tower: t.clone(), c }
    }

    pub fn zero(t: &Arc<ResidueTower>) -> TowerElem {
        TowerElem::raw(t, vec![Rat::zero(); t.dim()])
    }

    pub fn one(t: &Arc<ResidueTower>) -> TowerElem {
        let mut e = TowerElem::zero(t);
        e.c[0] = Rat::one();
        e
    }

    pub fn from_rat(t: &Arc<ResidueTower>, r: &Rat) -> Result<TowerElem, ArithError> {
        let mut e = TowerElem::zero(t);
        e.c[0] = t.base.from_rat(r)?;
        Ok(e)
    }

    pub fn from_int(t: &Arc<ResidueTower>, n: i64) -> TowerElem {
        let mut e = TowerElem::zero(t);
        e.c[0] = t.base.reduce_int(&BigInt::from(n));
        e
    }

    pub fn generator(t: &Arc<ResidueTower>, level: usize) -> TowerElem {
        let mut e = TowerElem::zero(t);
        e.c[t.dims[level]] = Rat::one();
        e
    }

    pub fn tower(&self) -> &Arc<ResidueTower> {
        &self.tower
    }

    pub fn coords(&self) -> &[Rat] {
        &self.c
    }

    pub fn from_coords(t: &Arc<ResidueTower>, c: Vec<Rat>) -> TowerElem {
        assert_eq!(c.len(), t.dim());
        TowerElem::raw(t, c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }

    /// The base-field value when the element lies in the base field.
    pub fn as_base(&self) -> Option<&Rat> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    /// Number of levels actually used by this element.
    pub fn level_support(&self) -> usize {
        let last = self.c.iter().rposition(|x| !x.is_zero()).unwrap_or(0);
        self.tower.dims.iter().position(|d| *d > last).unwrap_or(self.tower.levels.len())
    }

    pub fn embed(&self, t: &Arc<ResidueTower>) -> Result<TowerElem, ArithError> {
        if Arc::ptr_eq(&self.tower, t) {
            return Ok(self.clone());
        }
        if self.tower.is_prefix_of(t) {
            let mut c = self.c.clone();
            c.resize(t.dim(), Rat::zero());
            return Ok(TowerElem::raw(t, c));
        }
        if t.is_prefix_of(&self.tower) && self.c[t.dim()..].iter().all(|x| x.is_zero()) {
            return Ok(TowerElem::raw(t, self.c[..t.dim()].to_vec()));
        }
        Err(ArithError::TowerMismatch)
    }

    fn pair(&self, o: &TowerElem) -> (Arc<ResidueTower>, Vec<Rat>, Vec<Rat>) {
        let t = unify(&self.tower, &o.tower).expect("elements from unrelated residue towers");
        let mut a = self.c.clone();
        let mut b = o.c.clone();
        a.resize(t.dim(), Rat::zero());
        b.resize(t.dim(), Rat::zero());
        (t, a, b)
    }

    pub fn inv(&self) -> Result<TowerElem, ArithError> {
        let t = &self.tower;
        t.inv_at(t.levels.len(), &self.c)
            .map(|c| TowerElem::raw(t, c))
            .ok_or(ArithError::DivisionByZero)
    }

    pub fn div(&self, o: &TowerElem) -> Result<TowerElem, ArithError> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<TowerElem, ArithError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok(base.pow_u(e.unsigned_abs()))
    }

    pub fn pow_u(&self, mut e: u64) -> TowerElem {
        let mut acc = TowerElem::one(&self.tower);
        let mut b = self.clone();
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

    /// Evaluates a polynomial with low-to-high coefficients at `self`.
    pub fn eval_poly(&self, p: &[TowerElem]) -> TowerElem {
        let mut acc = TowerElem::zero(&self.tower);
        for c in p.iter().rev() {
            acc = &(&acc * self) + c;
        }
        acc
    }

    fn monomial_name(&self, idx: usize) -> String {
        let t = &self.tower;
        let mut parts = Vec::new();
        for (j, l) in t.levels.iter().enumerate() {
            let e = (idx / t.dims[j]) % l.degree;
            match e {
                0 => {}
                1 => parts.push(l.name.clone()),
                _ => parts.push(format!("{}^{}", l.name, e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for idx in (0..self.c.len()).rev() {
            let c = &self.c[idx];
            if c.is_zero() {
                continue;
            }
            let m = self.monomial_name(idx);
            let neg = c.is_negative();
            let a = c.abs();
            let body = if m.is_empty() {
                a.to_string()
            } else if a.is_one() {
                m
            } else {
                format!("{a}*{m}")
            };
            if out.is_empty() {
                out = if neg { format!("-{body}") } else { body };
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl PartialEq for TowerElem {
    fn eq(&self, o: &TowerElem) -> bool {
        match unify(&self.tower, &o.tower) {
            Ok(t) => {
                let n = t.dim();
                (0..n).all(|i| {
                    let z = Rat::zero();
                    self.c.get(i).unwrap_or(&z) == o.c.get(i).unwrap_or(&z)
                })
            }
            Err(_) => false,
        }
    }
}

impl Eq for TowerElem {}

impl Add for &TowerElem {
    type Output = TowerElem;
    fn add(self, o: &TowerElem) -> TowerElem {
        let (t, a, b) = self.pair(o);
        let c = t.add_at(&a, &b);
        TowerElem::raw(&t, c)
    }
}

impl Sub for &TowerElem {
    type Output = TowerElem;
    fn sub(self, o: &TowerElem) -> TowerElem {
        let (t, a, b) = self.pair(o);
        let c = t.sub_at(&a, &b);
        TowerElem::raw(&t, c)
    }
}

impl Mul for &TowerElem {
    type Output = TowerElem;
    fn mul(self, o: &TowerElem) -> TowerElem {
        let (t, a, b) = self.pair(o);
        let c = t.mul_at(t.levels.len(), &a, &b);
        TowerElem::raw(&t, c)
    }
}

impl Neg for &TowerElem {
    type Output = TowerElem;
    fn neg(self) -> TowerElem {
        let c = self.c.iter().map(|x| self.tower.base.neg(x)).collect();
        TowerElem::raw(&self.tower, c)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for TowerElem {
            type Output = TowerElem;
            fn $m(self, o: TowerElem) -> TowerElem { (&self).$m(&o) }
        }
        impl $tr<&TowerElem> for TowerElem {
            type Output = TowerElem;
            fn $m(self, o: &TowerElem) -> TowerElem { (&self).$m(o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for TowerElem {
    type Output = TowerElem;
    fn neg(self) -> TowerElem {
        -&self
    }
}

/// A subfield of a tower: the first `prefix_levels` levels with extra
/// elements adjoined.
#[derive(Clone, Debug)]
pub struct Subfield {
    pub prefix_levels: usize,
    pub adjoined: Vec<TowerElem>,
}

impl Subfield {
    pub fn prefix(k: usize) -> Subfield {
        Subfield { prefix_levels: k, adjoined: Vec::new() }
    }

    pub fn with(&self, e: TowerElem) -> Subfield {
        let mut s = self.clone();
        s.adjoined.push(e);
        s
    }

    fn span(&self, t: &Arc<ResidueTower>) -> Result<(Span, Vec<Vec<Rat>>), ArithError> {
        if self.prefix_levels > t.levels.len() {
            return Err(ArithError::BadSubfield(format!(
                "prefix of {} levels in a tower of {}",
                self.prefix_levels,
                t.levels.len()
            )));
        }
        let adj: Vec<TowerElem> =
            self.adjoined.iter().map(|a| a.embed(t)).collect::<Result<_, _>>()?;
        let n = t.dim();
        let mut span = Span::new(t.base.clone());
        let mut basis = Vec::new();
        for i in 0..t.dims[self.prefix_levels] {
            let mut v = vec![Rat::zero(); n];
            v[i] = Rat::one();
            span.insert(&v);
            basis.push(v);
        }
        loop {
            let mut grew = false;
            for a in &adj {
                let snapshot = basis.clone();
                for b in &snapshot {
                    let p = t.mul_at(t.levels.len(), &a.c, b);
                    if span.insert(&p).is_some() {
                        basis.push(p);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Ok((span, basis))
    }

    /// Basis over the base field, as elements of `t`.
    pub fn basis(&self, t: &Arc<ResidueTower>) -> Result<Vec<TowerElem>, ArithError> {
        Ok(self.span(t)?.1.into_iter().map(|c| TowerElem::raw(t, c)).collect())
    }

    pub fn dimension(&self, t: &Arc<ResidueTower>) -> Result<usize, ArithError> {
        Ok(self.span(t)?.1.len())
    }

    pub fn contains(&self, e: &TowerElem) -> Result<bool, ArithError> {
        let (span, _) = self.span(e.tower())?;
        Ok(span.contains(&e.c))
    }

    fn tower_for(&self, e: &TowerElem) -> Result<Arc<ResidueTower>, ArithError> {
        let mut t = e.tower.clone();
        for a in &self.adjoined {
            t = unify(&t, &a.tower)?;
        }
        Ok(t)
    }
}

/// Degree of the minimal polynomial of `e` over `sub`.
pub fn degree_over(e: &TowerElem, sub: &Subfield) -> Result<usize, ArithError> {
    Ok(minimal_polynomial_over(e, sub)?.len() - 1)
}

/// Monic minimal polynomial of `e` over `sub`, low-to-high, found as the
/// first linear dependence among powers of `e` over a basis of `sub`.
pub fn minimal_polynomial_over(e: &TowerElem, sub: &Subfield) -> Result<Vec<TowerElem>, ArithError> {
    let t = sub.tower_for(e)?;
    let e = e.embed(&t)?;
    let basis = sub.basis(&t)?;
    let k = basis.len();
    let mut span = Span::new(t.base.clone());
    let mut pow = TowerElem::one(&t);
    let mut m = 0usize;
    loop {
        if let Some(c) = span.express(&pow.c) {
            // pow = Σ c[j*k + b] basis[b] e^j
            let mut poly: Vec<TowerElem> = (0..m)
                .map(|j| {
                    let mut acc = TowerElem::zero(&t);
                    for (b, bv) in basis.iter().enumerate() {
                        let x = &c[j * k + b];
                        if !x.is_zero() {
                            acc = &acc + &(&TowerElem::from_rat(&t, x).unwrap() * bv);
                        }
                    }
                    -acc
                })
                .collect();
            poly.push(TowerElem::one(&t));
            return Ok(poly);
        }
        for b in &basis {
            span.insert(&(b * &pow).c);
        }
        pow = &pow * &e;
        m += 1;
    }
}
