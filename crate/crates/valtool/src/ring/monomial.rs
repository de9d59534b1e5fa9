//! Recognizing extensions of the form `u = γ·x^a`, `v = x^b·f`.

use super::{RingElem, RingError};

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialForm {
    pub a: u32,
    pub b: u32,
    pub gamma: RingElem,
    pub f: RingElem,
    /// Order of `f` modulo x.
    pub d: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MonomialCheck {
    Monomial(MonomialForm),
    NotMonomial(String),
}

impl MonomialCheck {
    pub fn form(&self) -> Option<&MonomialForm> {
        match self {
            MonomialCheck::Monomial(m) => Some(m),
            MonomialCheck::NotMonomial(_) => None,
        }
    }
}

/// Checks the images of the two parameters of R in S.
pub fn monomialize_images(images: &[RingElem; 2]) -> Result<MonomialCheck, RingError> {
    let [u, v] = images;
    if u.is_zero() || v.is_zero() {
        return Err(RingError::ZeroElement);
    }
    let a = u.x_order().unwrap();
    if a == 0 {
        return Ok(MonomialCheck::NotMonomial(format!("x does not divide the first image {u}")));
    }
    let gamma = u.div_monomial(a, 0);
    if !gamma.is_unit() {
        return Ok(MonomialCheck::NotMonomial(format!(
            "first image {u} is not a unit times a power of x"
        )));
    }
    let b = v.x_order().unwrap();
    let f = v.div_monomial(b, 0);
    if f.is_unit() {
        return Ok(MonomialCheck::NotMonomial(format!("second image {v} is a unit times a power of x")));
    }
    let d = f.order_mod_x().expect("x divides f after removing its x-part");
    Ok(MonomialCheck::Monomial(MonomialForm { a, b, gamma, f, d }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ResidueTower;
    use crate::ring::LocalRingCtx;

    fn check(u: &str, v: &str) -> MonomialCheck {
        let s = LocalRingCtx::new("S", &ResidueTower::prime(2).unwrap(), ["x", "y"]).unwrap();
        let p = |t: &str| RingElem::parse(&s, t).unwrap();
        let (u, v) = (p(u), p(v));
        let m = monomialize_images(&[u.clone(), v.clone()]).unwrap();
        if let MonomialCheck::Monomial(f) = &m {
            assert_eq!(f.gamma.mul_monomial(f.a, 0), u);
            assert_eq!(f.f.mul_monomial(f.b, 0), v);
        }
        m
    }

    #[test]
    fn examples() {
        let m = check("x", "y^2");
        let f = m.form().unwrap();
        assert_eq!((f.a, f.b, f.d), (1, 0, 2));
        assert!(matches!(check("x^2", "x^3 + x^3*y"), MonomialCheck::NotMonomial(_)));
        let m = check("x^2", "x*y^3");
        let f = m.form().unwrap();
        assert_eq!((f.a, f.b, f.d), (2, 1, 3));
        assert!(matches!(check("x + y", "y"), MonomialCheck::NotMonomial(_)));
        let m = check("x^2 + x^3", "y + x*y");
        assert_eq!(m.form().unwrap().d, 1);
    }
}
