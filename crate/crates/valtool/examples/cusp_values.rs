//! Values on the cusp valuation, computed from the generating sequence and
//! checked against the parametrization `x = t^2`, `y = t^3 + t^4`.

use valtool::fixtures;
use valtool::genseq::{evaluate, expand, initial_form};
use valtool::ring::{series_value, RingElem, SeriesValue};

fn main() {
    let g = fixtures::v1();
    let emb = fixtures::v1_series(g.ctx());
    println!("betas: {}", g.betas().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "));
    for s in ["x", "y", "y^2 - x^3", "y^2 + x^3", "y^2 - x^3 - 2*x^2*y", "x^5 - y^2*x^2 + y^4"] {
        let f = RingElem::parse(g.ctx(), s).unwrap();
        let v = match evaluate(&f, &g) {
            Ok(v) => v.to_string(),
            Err(e) => format!("({e})"),
        };
        let sv = match series_value(&f, &emb).unwrap() {
            SeriesValue::Value(v) => v.to_string(),
            SeriesValue::InsufficientPrecision { at_least } => format!(">= {at_least}"),
        };
        println!("{s:<24} value {v:<6} series {sv}");
    }

    let f = RingElem::parse(g.ctx(), "y^3 + x^2*y + x^4").unwrap();
    let e = expand(&f, &g).unwrap();
    println!("\nexpansion of {f}:");
    for t in &e.terms {
        println!("  {} * {}  (value {})", t.coeff, g.monomial_name(&t.exps), t.value);
    }
    println!("initial form: {}", initial_form(&f, &g).unwrap().render(&g.key_names()));
}
