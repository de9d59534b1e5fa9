//! Presentation of the graded algebra and a membership query.

use valtool::fixtures;
use valtool::graded::{graded_piece_basis, graded_presentation, key_form, subalgebra_membership};
use valtool::arith::Value;

fn main() {
    let g = fixtures::v1();
    let pres = graded_presentation(&g, 2).unwrap();
    print!("{pres}");

    for gamma in [Value::int(3), Value::frac(7, 2), Value::frac(9, 2)] {
        let basis = graded_piece_basis(&gamma, &g, 2).unwrap();
        let names: Vec<_> = basis.iter().map(|e| g.monomial_name(e)).collect();
        println!("piece {gamma}: {}", names.join(", "));
    }

    let x = key_form(&g, 0);
    let y = key_form(&g, 1);
    let k = g.ctx().residue().clone();
    let m = subalgebra_membership(&y.pow(2), std::slice::from_ref(&x), &g, &k).unwrap();
    println!("in(y)^2 in k[in(x)]: {} ({:?})", m.member, m.certificate);
    let m = subalgebra_membership(&y, &[x], &g, &k).unwrap();
    println!("in(y) in k[in(x)]: {}", m.member);
}
