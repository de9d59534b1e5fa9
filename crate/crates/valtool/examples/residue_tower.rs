//! Arithmetic in a tower of residue fields.

use valtool::arith::{degree_over, minimal_polynomial_over, ResidueTower, Subfield, TowerElem};

fn main() {
    let q = ResidueTower::rational();
    let one = TowerElem::one(&q);
    let zero = TowerElem::zero(&q);
    // i^2 + 1, then w^2 - i.
    let t1 = q.extend("i", &[one.clone(), zero.clone(), one.clone()]).unwrap();
    let i = TowerElem::generator(&t1, 0);
    let one1 = TowerElem::one(&t1);
    let t2 = t1.extend("w", &[-i.embed(&t1).unwrap(), TowerElem::zero(&t1), one1]).unwrap();
    let w = TowerElem::generator(&t2, 1);
    println!("dimension over Q: {}", t2.dim());
    println!("w^4 = {}", w.pow_u(4));
    println!("1/(1 + w) = {}", (&TowerElem::one(&t2) + &w).inv().unwrap());

    let e = &w + &w.pow_u(3);
    for k in 0..=2 {
        let sub = Subfield::prefix(k);
        let mp = minimal_polynomial_over(&e, &sub).unwrap();
        let shown: Vec<_> = mp.iter().map(|c| c.to_string()).collect();
        println!("over level {k}: degree {}, minpoly [{}]", degree_over(&e, &sub).unwrap(), shown.join(", "));
    }
}
