//! Two extensions of one valuation along `u = x^2`, `v = y^2`, once in
//! rational rank two and once for a discrete valuation.

use valtool::extension::{splitting_report, SplitOptions};
use valtool::fixtures;
use valtool::graded::fingen_detect;

fn main() {
    for (name, fx) in [("rank two", fixtures::pi2()), ("discrete", fixtures::disc())] {
        println!("== {name}");
        let rep = splitting_report(&fx.candidates, &fx.ext, &fx.r, &SplitOptions::default()).unwrap();
        print!("{rep}");
        let st = fingen_detect(&fx.r, &fx.s, &fx.ext, 4).unwrap();
        print!("{st}");
        println!();
    }
}
