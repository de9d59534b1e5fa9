use proptest::prelude::*;

use valtool::arith::{rat, IrrationalDescriptor, Value, ValueGroup};
use valtool::fixtures;
use valtool::genseq::evaluate;
use valtool::ring::RingElem;
use valtool::scenario::{parse_scenario, parse_value, run_scenario, Format, RunOptions};

const V1: &str = include_str!("../fixtures/v1.scn");

fn poly_text() -> impl Strategy<Value = String> {
    prop::collection::vec((-3i64..=3, 0u32..=6, 0u32..=4), 1..6).prop_map(|ts| {
        let mut s = String::from("x");
        for (c, i, j) in ts {
            if c != 0 && i + j > 0 {
                s.push_str(&format!(" + ({c})*x^{i}*y^{j}"));
            }
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn displayed_values_parse_back(a in -50i64..50, b in 1i64..20, c in -50i64..50, d in 1i64..20) {
        let g = ValueGroup::with_irrational(IrrationalDescriptor::pi("pi"));
        let v = Value::new(rat(a, b), rat(c, d));
        prop_assert_eq!(parse_value(&v.to_string(), &g).unwrap(), v.clone());
        let r = Value::new(rat(a, b), rat(0, 1));
        prop_assert_eq!(parse_value(&r.to_string(), &ValueGroup::rational()).unwrap(), r);
    }

    #[test]
    fn scenario_eval_matches_the_library(f in poly_text()) {
        let text = format!("{V1}eval {f}\n");
        let sc = parse_scenario(&text).unwrap();
        let rep = run_scenario(&sc, &RunOptions::default());
        let last = rep.sections.last().unwrap();
        let g = fixtures::v1();
        let v = evaluate(&RingElem::parse(g.ctx(), &f).unwrap(), &g).unwrap();
        let first = last.text.lines().next().unwrap();
        prop_assert_eq!(first, format!("value {v}"));
        prop_assert!(last.warnings.is_empty());
        prop_assert_eq!(rep.render(Format::Text).faults, 0);
    }
}
