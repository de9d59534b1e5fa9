//! Builds a scenario from text and prints the report in every format.

use valtool::scenario::{parse_scenario, run_scenario, Format, RunOptions};

const TEXT: &str = "
[field]
base = Q

[ring R]
params = x, y

[embedding curve]
ring = R
x = t^3
y = t^5 + t^7 + O(t^30)
unit = x 3

[valuation nu]
ring = R
beta = 3, 5
key P2 = y^3 - x^5 value 17
oracle = curve

[run]
validate
eval y^3 - x^5
expand y^4 + x^2
graded 2
blowup 1
";

fn main() {
    let sc = match parse_scenario(TEXT) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let rep = run_scenario(&sc, &RunOptions::default());
    for f in [Format::Text, Format::Csv, Format::Dot] {
        println!("---- {f:?}");
        print!("{}", rep.render(f).body);
    }
}
