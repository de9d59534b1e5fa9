//! Values `q0 + q1·τ` and their order.
//!
//! The irrational basis element τ is known only through nested rational
//! intervals, so comparison refines until the sign of the difference is
//! settled or a budget runs out.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use super::ArithError;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Value {
    pub q0: Rat,
    pub q1: Rat,
}

impl Value {
    pub fn new(q0: Rat, q1: Rat) -> Self {
        Value { q0, q1 }
    }

    pub fn rational(q0: Rat) -> Self {
        Value { q0, q1: Rat::zero() }
    }

    pub fn int(n: i64) -> Self {
        Value::rational(int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Value::rational(rat(n, d))
    }

    pub fn zero() -> Self {
        Value::rational(Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.q0.is_zero() && self.q1.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q1.is_zero()
    }

    pub fn scale(&self, k: &Rat) -> Value {
        Value { q0: &self.q0 * k, q1: &self.q1 * k }
    }

    pub fn times(&self, k: i64) -> Value {
        self.scale(&int(k))
    }

    /// `Some(r)` when `self = r·other`.
    pub fn ratio_to(&self, other: &Value) -> Option<Rat> {
        if other.is_zero() {
            return if self.is_zero() { Some(Rat::zero()) } else { None };
        }
        let r = if other.q0.is_zero() { &self.q1 / &other.q1 } else { &self.q0 / &other.q0 };
        if other.scale(&r) == *self {
            Some(r)
        } else {
            None
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q1.is_zero() {
            write!(f, "{}", self.q0)
        } else {
            write!(f, "({},{})", self.q0, self.q1)
        }
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, o: &Value) -> Value {
        Value { q0: &self.q0 + &o.q0, q1: &self.q1 + &o.q1 }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, o: Value) -> Value {
        &self + &o
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, o: &Value) -> Value {
        Value { q0: &self.q0 - &o.q0, q1: &self.q1 - &o.q1 }
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, o: Value) -> Value {
        &self - &o
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value { q0: -self.q0, q1: -self.q1 }
    }
}

impl AddAssign<&Value> for Value {
    fn add_assign(&mut self, o: &Value) {
        self.q0 += &o.q0;
        self.q1 += &o.q1;
    }
}

impl std::iter::Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |a, b| a + b)
    }
}

#[derive(Clone, Debug)]
enum Source {
    Table(Vec<(Rat, Rat)>),
    Sqrt(BigInt),
    Pi,
}

/// Nested rational intervals converging to an irrational τ.
#[derive(Clone, Debug)]
pub struct IrrationalDescriptor {
    name: String,
    source: Source,
}

const PI_DIGITS: &str = "314159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384460955058223172535940812848111745028410270193852110555964462294895493038196";

impl IrrationalDescriptor {
    /// Explicit table; intervals must be nested and strictly shrinking.
    pub fn table(name: &str, intervals: Vec<(Rat, Rat)>) -> Result<Self, ArithError> {
        if intervals.is_empty() {
            return Err(ArithError::BadDescriptor(format!("{name}: empty interval table")));
        }
        for (k, (lo, hi)) in intervals.iter().enumerate() {
            if lo >= hi {
                return Err(ArithError::BadDescriptor(format!("{name}: interval {k} is empty")));
            }
            if k > 0 {
                let (plo, phi) = &intervals[k - 1];
                if lo < plo || hi > phi || (lo == plo && hi == phi) {
                    return Err(ArithError::BadDescriptor(format!(
                        "{name}: interval {k} does not strictly refine interval {}",
                        k - 1
                    )));
                }
            }
        }
        Ok(IrrationalDescriptor { name: name.to_string(), source: Source::Table(intervals) })
    }

    /// Square root of a non-square positive integer, by bisection.
    pub fn sqrt(name: &str, n: u64) -> Result<Self, ArithError> {
        let r = (n as f64).sqrt() as u64;
        for c in r.saturating_sub(1)..=r + 1 {
            if c * c == n {
                return Err(ArithError::BadDescriptor(format!("{name}: {n} is a perfect square")));
            }
        }
        Ok(IrrationalDescriptor { name: name.to_string(), source: Source::Sqrt(BigInt::from(n)) })
    }

    /// Decimal interval table for π: `[3.14, 3.15]`, `[3.141, 3.142]`, ...
    pub fn pi(name: &str) -> Self {
        IrrationalDescriptor { name: name.to_string(), source: Source::Pi }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn interval(&self, k: usize) -> Option<(Rat, Rat)> {
        match &self.source {
            Source::Table(t) => t.get(k).cloned(),
            Source::Pi => {
                let digits = k + 3;
                if digits > PI_DIGITS.len() {
                    return None;
                }
                let num: BigInt = PI_DIGITS[..digits].parse().ok()?;
                let den = num::pow(BigInt::from(10), digits - 1);
                Some((
                    Rat::new(num.clone(), den.clone()),
                    Rat::new(num + BigInt::one(), den),
                ))
            }
            Source::Sqrt(n) => {
                let mut lo = Rat::from_integer(n.sqrt());
                let mut hi = &lo + Rat::one();
                let n = Rat::from_integer(n.clone());
                for _ in 0..k {
                    let mid = (&lo + &hi) / int(2);
                    if &mid * &mid < n {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some((lo, hi))
            }
        }
    }
}

/// Order context shared by every value of one scenario.
#[derive(Clone, Debug)]
pub struct ValueGroup {
    tau: Option<Arc<IrrationalDescriptor>>,
    budget: usize,
}

impl Default for ValueGroup {
    fn default() -> Self {
        ValueGroup::rational()
    }
}

impl ValueGroup {
    pub fn rational() -> Self {
        ValueGroup { tau: None, budget: 64 }
    }

    pub fn with_irrational(tau: IrrationalDescriptor) -> Self {
        ValueGroup { tau: Some(Arc::new(tau)), budget: 64 }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn irrational(&self) -> Option<&IrrationalDescriptor> {
        self.tau.as_deref()
    }

    /// Sign of `v` as an ordering against zero.
    pub fn sign(&self, v: &Value) -> Result<Ordering, ArithError> {
        if v.q1.is_zero() {
            return Ok(v.q0.cmp(&Rat::zero()));
        }
        let tau = self.tau.as_ref().ok_or_else(|| ArithError::MissingIrrational(v.to_string()))?;
        for k in 0..self.budget {
            let Some((lo, hi)) = tau.interval(k) else { break };
            let a = &v.q0 + &v.q1 * &lo;
            let b = &v.q0 + &v.q1 * &hi;
            let (low, high) = if v.q1.is_positive() { (a, b) } else { (b, a) };
            // τ lies strictly inside its intervals
            if !low.is_negative() {
                return Ok(Ordering::Greater);
            }
            if !high.is_positive() {
                return Ok(Ordering::Less);
            }
        }
        Err(ArithError::UndecidedComparison(v.to_string(), "0".into()))
    }

    pub fn cmp(&self, a: &Value, b: &Value) -> Result<Ordering, ArithError> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        self.sign(&(a - b)).map_err(|e| match e {
            ArithError::UndecidedComparison(..) => {
                ArithError::UndecidedComparison(a.to_string(), b.to_string())
            }
            e => e,
        })
    }

    pub fn lt(&self, a: &Value, b: &Value) -> Result<bool, ArithError> {
        Ok(self.cmp(a, b)? == Ordering::Less)
    }

    pub fn le(&self, a: &Value, b: &Value) -> Result<bool, ArithError> {
        Ok(self.cmp(a, b)? != Ordering::Greater)
    }

    pub fn is_positive(&self, v: &Value) -> Result<bool, ArithError> {
        Ok(self.sign(v)? == Ordering::Greater)
    }

    pub fn min<'a>(&self, a: &'a Value, b: &'a Value) -> Result<&'a Value, ArithError> {
        Ok(if self.le(a, b)? { a } else { b })
    }
}

pub fn value_cmp(a: &Value, b: &Value, group: &ValueGroup) -> Result<Ordering, ArithError> {
    group.cmp(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pi_group() -> ValueGroup {
        ValueGroup::with_irrational(IrrationalDescriptor::pi("pi"))
    }

    #[test]
    fn rational_comparisons() {
        let g = ValueGroup::rational();
        assert_eq!(g.cmp(&Value::frac(3, 2), &Value::int(1)).unwrap(), Ordering::Greater);
        assert_eq!(g.cmp(&Value::frac(7, 2), &Value::frac(7, 2)).unwrap(), Ordering::Equal);
    }

    #[test]
    fn pi_plus_two_exceeds_four() {
        let g = pi_group();
        let a = Value::new(int(2), int(1));
        assert_eq!(g.cmp(&a, &Value::int(4)).unwrap(), Ordering::Greater);
        assert_eq!(g.cmp(&Value::int(5), &a).unwrap(), Ordering::Less);
    }

    #[test]
    fn first_pi_interval() {
        let (lo, hi) = IrrationalDescriptor::pi("pi").interval(0).unwrap();
        assert_eq!(lo, rat(314, 100));
        assert_eq!(hi, rat(315, 100));
    }

    #[test]
    fn close_comparison_needs_refinement() {
        // 355/113 - π ≈ 2.7e-7
        let g = pi_group();
        let a = Value::rational(rat(355, 113));
        let p = Value::new(int(0), int(1));
        assert_eq!(g.cmp(&a, &p).unwrap(), Ordering::Greater);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let t = IrrationalDescriptor::table("t", vec![(int(3), int(4))]).unwrap();
        let g = ValueGroup::with_irrational(t);
        let r = g.cmp(&Value::new(int(0), int(1)), &Value::rational(rat(7, 2)));
        assert!(matches!(r, Err(ArithError::UndecidedComparison(..))));
    }

    #[test]
    fn table_must_nest() {
        assert!(IrrationalDescriptor::table("t", vec![(int(3), int(4)), (int(2), int(3))]).is_err());
        assert!(IrrationalDescriptor::table("t", vec![(int(3), int(4)), (int(3), int(4))]).is_err());
    }

    #[test]
    fn sqrt_two_bisection() {
        let d = IrrationalDescriptor::sqrt("r", 2).unwrap();
        let (lo, hi) = d.interval(10).unwrap();
        assert!(&lo * &lo < int(2) && &hi * &hi > int(2));
        assert!(IrrationalDescriptor::sqrt("r", 9).is_err());
    }

    #[test]
    fn missing_irrational() {
        let g = ValueGroup::rational();
        assert!(g.sign(&Value::new(int(0), int(1))).is_err());
    }

    #[test]
    fn ratio() {
        let a = Value::new(int(2), int(1));
        assert_eq!(a.times(3).ratio_to(&a), Some(int(3)));
        assert_eq!(Value::int(1).ratio_to(&a), None);
    }
}
