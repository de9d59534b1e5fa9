//! Incremental Gaussian elimination over the base field.

use num::Zero;

use super::{BaseField, Rat};

/// Row-echelon span of inserted vectors, remembering how each echelon row
/// combines the independent inputs.
#[derive(Clone, Debug)]
pub struct Span {
    field: BaseField,
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
    combos: Vec<Vec<Rat>>,
    independent: usize,
}

impl Span {
    pub fn new(field: BaseField) -> Self {
        Span { field, rows: Vec::new(), pivots: Vec::new(), combos: Vec::new(), independent: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after elimination, with the combination of
    /// independent inputs that was subtracted.
    fn reduce(&self, v: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        let f = &self.field;
        let mut r: Vec<Rat> = v.to_vec();
        let mut combo = vec![Rat::zero(); self.independent];
        for (k, row) in self.rows.iter().enumerate() {
            let p = self.pivots[k];
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    r[j] = f.sub(&r[j], &f.mul(&c, x));
                }
            }
            for (j, x) in self.combos[k].iter().enumerate() {
                if !x.is_zero() {
                    combo[j] = f.add(&combo[j], &f.mul(&c, x));
                }
            }
        }
        (r, combo)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).0.iter().all(|x| x.is_zero())
    }

    /// Inserts `v`; returns its position among independent inputs, or
    /// `None` when it already lies in the span.
    pub fn insert(&mut self, v: &[Rat]) -> Option<usize> {
        let f = self.field.clone();
        let (mut r, combo) = self.reduce(v);
        let p = r.iter().position(|x| !x.is_zero())?;
        let idx = self.independent;
        self.independent += 1;
        for c in self.combos.iter_mut() {
            c.push(Rat::zero());
        }
        let mut combo: Vec<Rat> = combo.into_iter().map(|x| f.neg(&x)).collect();
        combo.push(num::One::one());
        let inv = f.inv(&r[p]);
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for x in combo.iter_mut() {
            *x = f.mul(x, &inv);
        }
        // keep earlier rows reduced at the new pivot
        for k in 0..self.rows.len() {
            let c = self.rows[k][p].clone();
            if c.is_zero() {
                continue;
            }
            for j in 0..r.len() {
                let t = f.mul(&c, &r[j]);
                self.rows[k][j] = f.sub(&self.rows[k][j], &t);
            }
            for j in 0..combo.len() {
                let t = f.mul(&c, &combo[j]);
                self.combos[k][j] = f.sub(&self.combos[k][j], &t);
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        self.combos.push(combo);
        Some(idx)
    }

    /// Coefficients over the independent inputs expressing `v`, if any.
    pub fn express(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let (r, combo) = self.reduce(v);
        if r.iter().all(|x| x.is_zero()) {
            Some(combo)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::int;
    use super::*;

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect()
    }

    #[test]
    fn express_over_inputs() {
        let mut s = Span::new(BaseField::Rational);
        let v = vecs(&[&[1, 2, 0], &[0, 1, 1], &[1, 3, 1]]);
        assert_eq!(s.insert(&v[0]), Some(0));
        assert_eq!(s.insert(&v[1]), Some(1));
        assert_eq!(s.insert(&v[2]), None);
        let target = vecs(&[&[2, 7, 3]])[0].clone();
        let c = s.express(&target).unwrap();
        let rebuilt: Vec<Rat> = (0..3).map(|j| &c[0] * &v[0][j] + &c[1] * &v[1][j]).collect();
        assert_eq!(rebuilt, target);
        assert!(s.express(&vecs(&[&[0, 0, 1]])[0]).is_none());
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn mod_two() {
        let mut s = Span::new(BaseField::Prime(2));
        let v = vecs(&[&[1, 1], &[1, 0]]);
        s.insert(&v[0]);
        s.insert(&v[1]);
        let c = s.express(&vecs(&[&[0, 1]])[0]).unwrap();
        assert_eq!(c, vec![int(1), int(1)]);
    }
}
