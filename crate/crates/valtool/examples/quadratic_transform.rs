//! One free transform of the cusp valuation, then a short chain.

use valtool::blowup::{free_transform, iterate_transforms, strict_transform};
use valtool::fixtures;
use valtool::genseq::evaluate;

fn main() {
    let g = fixtures::v1();
    let (m, h) = free_transform(&g).unwrap();
    let [(xa, xb), (ya, yb)] = m.forward();
    println!("x1 = x^{xa} y^{xb}, y1 = x^{ya} y^{yb}");
    println!("target betas: {}", h.betas().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "));

    let st = strict_transform(g.key(2), &m).unwrap();
    println!("strict transform of {}: {st}", g.key(2));
    println!("its value upstairs: {}", evaluate(&st, &h).unwrap());

    let fx = fixtures::cor_n32(6);
    let chain = iterate_transforms(&fx, 3);
    print!("\n{chain}");
    println!("shift table holds: {}", chain.holds());
}
