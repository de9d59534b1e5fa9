use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::arith::{ResidueTower, ValueGroup};
use crate::fixtures::{cor_n32, v1};
use crate::genseq::{validate_sequence, GenSeqSpec};

fn p(ctx: &Arc<LocalRingCtx>, s: &str) -> RingElem {
    RingElem::parse(ctx, s).unwrap()
}

fn q(t: &Arc<crate::arith::ResidueTower>, n: i64) -> TowerElem {
    TowerElem::from_int(t, n)
}

#[test]
fn euclid_examples() {
    assert_eq!(euclid(2, 3), Some((1, 2, 1)));
    assert_eq!(euclid(1, 1), Some((0, 1, 1)));
    assert_eq!(euclid(1, 5), Some((0, 1, 1)));
    assert_eq!(euclid(3, 2), Some((1, 1, 1)));
    assert_eq!(euclid(3, 1), Some((1, 0, -1)));
    assert_eq!(euclid(2, 4), None);
    for n in 1..12u32 {
        for w in 1..12u32 {
            if let Some((a, b, e)) = euclid(n, w) {
                assert_eq!(n as i64 * b as i64 - w as i64 * a as i64, e as i64);
            }
        }
    }
}

#[test]
fn v1_free_transform() {
    let g = v1();
    let (m, t) = free_transform(&g).unwrap();
    assert_eq!((m.a, m.b, m.eps), (1, 2, 1));
    assert_eq!(m.forward(), [(2, -1), (-3, 2)]);
    assert!(m.center.is_one());
    assert_eq!(t.beta(0), &Value::frac(1, 2));
    assert_eq!(t.beta(1), &Value::frac(1, 2));
    assert_eq!(t.num_keys(), 2);
    assert_eq!(t.alpha(1), Some(&q(t.tower(), 2)));
    assert_eq!(t.nbar(1), g.nbar(2));

    let p2 = g.key(2);
    let chart = m.pull_to_chart(p2).unwrap();
    assert_eq!(chart, p(m.chart(), "x1^6*y1^3*(y1 - 1)"));
    let st = strict_transform(p2, &m).unwrap();
    assert_eq!(st, p(m.target(), "z1"));
    assert_eq!(m.to_chart(&st), p(m.chart(), "y1 - 1"));
    assert_eq!(exceptional_power(p2, &m).unwrap(), 6);
    for (f, k) in [("x", 2), ("y", 3)] {
        let f = p(g.ctx(), f);
        assert_eq!(strict_transform(&f, &m).unwrap(), RingElem::one(m.target()));
        assert_eq!(exceptional_power(&f, &m).unwrap(), k);
    }
    assert!(matches!(strict_transform(&RingElem::zero(g.ctx()), &m), Err(BlowupError::Precondition(_))));
}

#[test]
fn ordinary_quadratic_transform() {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let t = ctx.tower();
    let spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::int(1),
        steps: vec![KeyStep {
            n: 1,
            tail: vec![TailTerm { coeff: q(t, -1), exps: vec![1, 0] }],
            beta_next: Value::int(2),
            alpha: None,
        }],
        top_alpha: Some(TowerElem::one(t)),
        terminated: false,
    };
    let g = GenSeq::new(&ctx, &ValueGroup::rational(), spec).unwrap();
    let (m, tg) = free_transform(&g).unwrap();
    assert_eq!((m.a, m.b, m.eps), (0, 1, 1));
    assert_eq!(m.forward(), [(1, 0), (-1, 1)]);
    assert_eq!(strict_transform(&p(&ctx, "y - x"), &m).unwrap(), p(m.target(), "z1"));
    assert_eq!(tg.beta(1), &Value::int(1));
}

#[test]
fn missing_p2_is_rejected() {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::frac(3, 2),
        steps: vec![],
        top_alpha: None,
        terminated: false,
    };
    let g = GenSeq::new(&ctx, &ValueGroup::rational(), spec).unwrap();
    let err = free_transform(&g).unwrap_err();
    assert!(err.to_string().contains("insufficient keys"), "{err}");
}

#[test]
fn chains() {
    let g = v1();
    assert!(iterate_transforms(&g, 0).is_empty());
    let one = iterate_transforms(&g, 1);
    assert_eq!(one.len(), 1);
    assert!(one.truncated.is_none());
    assert!(one.holds(), "{one}");
    let three = iterate_transforms(&g, 3);
    assert_eq!(three.len(), 1);
    assert_eq!(three.truncated.as_deref(), Some("insufficient keys"));
}

#[test]
fn residue_field_grows_by_d1() {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let t = ctx.tower();
    let spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::int(1),
        steps: vec![KeyStep {
            n: 2,
            tail: vec![TailTerm { coeff: TowerElem::one(t), exps: vec![2, 0] }],
            beta_next: Value::frac(5, 2),
            alpha: None,
        }],
        top_alpha: None,
        terminated: false,
    };
    let g = GenSeq::new(&ctx, &ValueGroup::rational(), spec).unwrap();
    let rec = iterate_transforms(&g, 1);
    let s = &rec.steps[0];
    assert_eq!(s.residue_degree, (2, Some(2)));
    assert_eq!(s.map.unit_residue(1), &(&s.map.center * &q(s.target.tower(), 2)));
    assert_eq!(s.target.beta(1), &Value::frac(1, 2));
    assert_eq!(s.target.nbar(1), GroupIndex::Finite(2));
    assert!(s.table.iter().all(|r| r.holds));
}

#[test]
fn pullback_agrees_with_target() {
    let g = v1();
    let (m, t) = free_transform(&g).unwrap();
    let pb = Pullback::new(&g, &m);
    assert_eq!(pb.oracle_value(&p(m.target(), "z1")).unwrap(), OracleValue::Exact(Value::frac(1, 2)));
    assert_eq!(pb.oracle_value(&p(m.target(), "x1")).unwrap(), OracleValue::Exact(Value::frac(1, 2)));
    let t = t.with_oracle(Arc::new(pb)).unwrap();
    let rep = validate_sequence(&t).unwrap();
    assert!(rep.passed(), "{rep}");
}

#[test]
fn cor_n32_transforms() {
    let g = cor_n32(6);
    let rec = iterate_transforms(&g, 2);
    assert_eq!(rec.len(), 2);
    assert!(rec.holds(), "{rec}");
    let s = &rec.steps[0];
    for j in 2..=g.top() {
        let l = strict_key_form(&g, &s.map, &s.target, j).unwrap();
        assert!(l.holds, "{l:?}");
    }
    let pb = Pullback::new(&g, &s.map);
    for i in 0..=s.target.top().min(3) {
        assert_eq!(pb.oracle_value(s.target.key(i)).unwrap(), OracleValue::Exact(s.target.beta(i).clone()));
    }
}

#[test]
fn exceptional_exponent_bound() {
    let g = cor_n32(5);
    let (m, _) = free_transform(&g).unwrap();
    let mut seen = 0;
    for e0 in 0..8u32 {
        for mask in 0..16u32 {
            let mut exps = vec![e0];
            exps.extend((0..g.top()).map(|k| (mask >> k) & 1));
            exps.truncate(g.num_keys());
            for i in 1..=g.top() {
                if let Some((t, lam, ok)) = exceptional_exponents(&g, &m, &exps, i) {
                    seen += 1;
                    assert!(ok, "exps {exps:?} level {i}: t = {t}, λ = {lam}");
                }
            }
        }
    }
    assert!(seen > 50);
}

fn arb_poly() -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
    proptest::collection::vec((0u32..7, 0u32..5, -3i64..4), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_preserves_values(a in arb_poly()) {
        let g = v1();
        let (m, t) = free_transform(&g).unwrap();
        let f = RingElem::from_terms(g.ctx(), a.iter().map(|&(i, j, k)| ((i, j), TowerElem::from_int(g.ctx().tower(), k))));
        prop_assume!(!f.is_zero());
        let tot = total_transform(&f, &m).unwrap();
        if let (Ok(v), Ok(w)) = (evaluate(&f, &g), evaluate(&tot, &t)) {
            prop_assert_eq!(v, w);
        }
        let st = strict_transform(&f, &m).unwrap();
        let k = exceptional_power(&f, &m).unwrap();
        if let (Ok(v), Ok(w)) = (evaluate(&f, &g), evaluate(&st, &t)) {
            prop_assert_eq!(v, &w + &t.beta(0).times(k as i64));
        }
    }
}
