//! The characteristic two extension `u = x`, `v = y^2` with its defect.

use valtool::extension::ramification_report;
use valtool::fixtures;
use valtool::graded::integral_relation;
use valtool::ring::RingElem;

fn main() {
    let fx = fixtures::def2();
    let rep = ramification_report(&fx.r, &fx.s, &fx.ext, 4).unwrap();
    print!("{rep}");
    print!("\n{}", rep.csv());

    println!();
    for s in ["x", "y", "x*y + y^3", "y^2 + x^5"] {
        let f = RingElem::parse(fx.s.ctx(), s).unwrap();
        let rel = integral_relation(&f, &fx.r, &fx.s, &fx.ext).unwrap();
        println!("f = {s:<10} {rel}  ({})", if rel.vanishes { "vanishes" } else { "fails" });
    }
}
