//! Indices of finitely generated subgroups of `ℚ + ℚτ`.

use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use super::{ArithError, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupIndex {
    Finite(u64),
    Infinite,
}

impl GroupIndex {
    pub fn finite(self) -> Option<u64> {
        match self {
            GroupIndex::Finite(n) => Some(n),
            GroupIndex::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == GroupIndex::Infinite
    }
}

impl std::ops::Mul for GroupIndex {
    type Output = GroupIndex;
    fn mul(self, o: GroupIndex) -> GroupIndex {
        match (self, o) {
            (GroupIndex::Finite(a), GroupIndex::Finite(b)) => GroupIndex::Finite(a * b),
            _ => GroupIndex::Infinite,
        }
    }
}

impl fmt::Display for GroupIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupIndex::Finite(n) => write!(f, "{n}"),
            GroupIndex::Infinite => write!(f, "inf"),
        }
    }
}

type Vec2 = [BigInt; 2];

/// Echelon basis of an integer lattice in ℤ²: either empty, one vector, or
/// `(g0, c), (0, g1)` with `g0, g1 > 0` and `0 ≤ c < g1`.
#[derive(Debug)]
struct Lattice {
    basis: Vec<Vec2>,
}

impl Lattice {
    fn new(vecs: &[Vec2]) -> Lattice {
        let mut pivot: Option<Vec2> = None;
        let mut rest: Vec<BigInt> = Vec::new();
        for v in vecs {
            if v[0].is_zero() {
                rest.push(v[1].clone());
                continue;
            }
            pivot = Some(match pivot {
                None => v.clone(),
                Some(p) => {
                    let e = p[0].extended_gcd(&v[0]);
                    let g = e.gcd;
                    let np = [g.clone(), &e.x * &p[1] + &e.y * &v[1]];
                    // the combination killing column 0
                    rest.push((&v[0] / &g) * &p[1] - (&p[0] / &g) * &v[1]);
                    np
                }
            });
        }
        let g1 = rest.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
        let mut basis = Vec::new();
        match pivot {
            Some(mut p) => {
                if p[0].is_negative() {
                    p = [-&p[0], -&p[1]];
                }
                if !g1.is_zero() {
                    p[1] = p[1].mod_floor(&g1);
                    basis.push(p);
                    basis.push([BigInt::zero(), g1]);
                } else {
                    basis.push(p);
                }
            }
            None => {
                if !g1.is_zero() {
                    basis.push([BigInt::zero(), g1]);
                }
            }
        }
        Lattice { basis }
    }

    fn rank(&self) -> usize {
        if self.basis.len() == 2 || self.basis.is_empty() {
            self.basis.len()
        } else {
            1
        }
    }

    fn contains(&self, v: &Vec2) -> bool {
        match self.basis.len() {
            0 => v[0].is_zero() && v[1].is_zero(),
            1 => {
                let b = &self.basis[0];
                let (i, j) = if b[0].is_zero() { (1, 0) } else { (0, 1) };
                if !v[i].is_multiple_of(&b[i]) {
                    return false;
                }
                let k = &v[i] / &b[i];
                k * &b[j] == v[j]
            }
            _ => {
                let (p, q) = (&self.basis[0], &self.basis[1]);
                if !v[0].is_multiple_of(&p[0]) {
                    return false;
                }
                let k = &v[0] / &p[0];
                let r = &v[1] - k * &p[1];
                r.is_multiple_of(&q[1])
            }
        }
    }

    /// `|det|` for rank 2, the generator for rank 1.
    fn covolume(&self) -> Option<BigInt> {
        match self.basis.len() {
            2 => Some((&self.basis[0][0] * &self.basis[1][1]).abs()),
            _ => None,
        }
    }
}

fn integer_vectors(lists: &[&[Value]]) -> Vec<Vec<Vec2>> {
    let mut l = BigInt::one();
    for list in lists {
        for v in list.iter() {
            l = l.lcm(v.q0.denom()).lcm(v.q1.denom());
        }
    }
    lists
        .iter()
        .map(|list| {
            list.iter()
                .map(|v| {
                    [
                        v.q0.numer() * (&l / v.q0.denom()),
                        v.q1.numer() * (&l / v.q1.denom()),
                    ]
                })
                .collect()
        })
        .collect()
}

/// `[G(big) : G(small)]`; errors when some element of `small` is not in `G(big)`.
pub fn group_index(big: &[Value], small: &[Value]) -> Result<GroupIndex, ArithError> {
    let iv = integer_vectors(&[big, small]);
    let lb = Lattice::new(&iv[0]);
    for (k, v) in iv[1].iter().enumerate() {
        if !lb.contains(v) {
            return Err(ArithError::NotContained(small[k].to_string()));
        }
    }
    let ls = Lattice::new(&iv[1]);
    if ls.rank() < lb.rank() {
        return Ok(GroupIndex::Infinite);
    }
    let idx = match lb.rank() {
        0 => BigInt::one(),
        1 => {
            let b = &lb.basis[0];
            let s = &ls.basis[0];
            let i = if b[0].is_zero() { 1 } else { 0 };
            (&s[i] / &b[i]).abs()
        }
        _ => ls.covolume().unwrap() / lb.covolume().unwrap(),
    };
    idx.to_u64().map(GroupIndex::Finite).ok_or(ArithError::IndexOverflow)
}

pub fn in_group(v: &Value, gens: &[Value]) -> bool {
    let iv = integer_vectors(&[gens, std::slice::from_ref(v)]);
    Lattice::new(&iv[0]).contains(&iv[1][0])
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat};
    use super::*;
    use proptest::prelude::*;

    fn v(a: i64, b: i64, c: i64, d: i64) -> Value {
        Value::new(rat(a, b), rat(c, d))
    }

    #[test]
    fn half_integers_over_integers() {
        let big = [Value::int(1), Value::frac(3, 2)];
        assert_eq!(group_index(&big, &[Value::int(1)]).unwrap(), GroupIndex::Finite(2));
    }

    #[test]
    fn rank_two_determinant_ratio() {
        let big = [v(1, 1, 0, 1), v(1, 1, 1, 1)];
        let small = [v(2, 1, 0, 1), v(2, 1, 1, 1)];
        assert_eq!(group_index(&big, &small).unwrap(), GroupIndex::Finite(2));
    }

    #[test]
    fn identity_and_infinite() {
        assert_eq!(group_index(&[Value::int(1)], &[Value::int(1)]).unwrap(), GroupIndex::Finite(1));
        let big = [v(1, 1, 0, 1), v(0, 1, 1, 1)];
        assert_eq!(group_index(&big, &[Value::int(3)]).unwrap(), GroupIndex::Infinite);
        assert_eq!(group_index(&[], &[]).unwrap(), GroupIndex::Finite(1));
    }

    #[test]
    fn containment_error() {
        let r = group_index(&[Value::int(1)], &[Value::frac(1, 2)]);
        assert!(matches!(r, Err(ArithError::NotContained(_))));
        assert!(group_index(&[Value::int(1)], &[Value::new(int(0), int(1))]).is_err());
    }

    #[test]
    fn membership() {
        let g = [Value::int(1), Value::frac(3, 2)];
        assert!(in_group(&Value::frac(7, 2), &g));
        assert!(!in_group(&Value::frac(1, 3), &g));
    }

    fn arb_vec() -> impl Strategy<Value = Value> {
        (-6i64..7, 1i64..5, -6i64..7, 1i64..5).prop_map(|(a, b, c, d)| v(a, b, c, d))
    }

    fn combo(gens: &[Value], coeffs: &[i64]) -> Value {
        gens.iter().zip(coeffs).map(|(g, k)| g.times(*k)).sum()
    }

    proptest! {
        #[test]
        fn tower_law(gens in proptest::collection::vec(arb_vec(), 1..4),
                     c1 in proptest::collection::vec(proptest::collection::vec(-4i64..5, 3), 1..4),
                     c2 in proptest::collection::vec(proptest::collection::vec(-4i64..5, 3), 1..4)) {
            let s1: Vec<Value> = c1.iter().map(|c| combo(&gens, c)).collect();
            let s2: Vec<Value> = c2.iter().map(|c| combo(&s1, c)).collect();
            let a = group_index(&gens, &s1).unwrap();
            let b = group_index(&s1, &s2).unwrap();
            let c = group_index(&gens, &s2).unwrap();
            prop_assert_eq!(a * b, c);
        }
    }
}
