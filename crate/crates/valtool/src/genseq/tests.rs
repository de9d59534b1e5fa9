use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::arith::{int, rat, ResidueTower, TowerElem, Value, ValueGroup};
use crate::ring::{series_value, LocalRingCtx, RingElem, SeriesEmbedding, SeriesValue, TruncSeries};

pub(crate) fn v1_oracle(ctx: &Arc<LocalRingCtx>) -> SeriesEmbedding {
    let t = ctx.tower();
    let one = TowerElem::one(t);
    let x = TruncSeries::new(t, [(2, one.clone())], None);
    let y = TruncSeries::new(t, [(3, one.clone()), (4, one)], None);
    SeriesEmbedding::new(ctx, 1, [x, y], (0, int(1))).unwrap()
}

pub(crate) fn v1_spec(t: &Arc<ResidueTower>, beta2: Value, tail: Vec<u32>) -> GenSeqSpec {
    GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::frac(3, 2),
        steps: vec![KeyStep {
            n: 2,
            tail: vec![TailTerm { coeff: TowerElem::from_int(t, -1), exps: tail }],
            beta_next: beta2,
            alpha: None,
        }],
        top_alpha: None,
        terminated: false,
    }
}

pub(crate) fn v1(with_oracle: bool) -> GenSeq {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let g = GenSeq::new(&ctx, &ValueGroup::rational(), v1_spec(ctx.tower(), Value::frac(7, 2), vec![3, 0])).unwrap();
    if with_oracle {
        g.with_oracle(Arc::new(v1_oracle(&ctx))).unwrap()
    } else {
        g
    }
}

fn p(g: &GenSeq, s: &str) -> RingElem {
    RingElem::parse(g.ctx(), s).unwrap()
}

fn q(n: i64) -> TowerElem {
    TowerElem::from_int(&ResidueTower::rational(), n)
}

#[test]
fn v1_derived_data() {
    let g = v1(true);
    let rep = validate_sequence(&g).unwrap();
    assert!(rep.passed(), "{rep}");
    assert_eq!(g.nbar(1), GroupIndex::Finite(2));
    assert_eq!(g.u_exps(1), Some(&[3u32][..]));
    assert_eq!(g.alpha(1), Some(&q(1)));
    assert_eq!((g.d(1), g.n(1)), (Some(1), Some(2)));
    assert_eq!(g.u_exps(2), Some(&[2u32, 1][..]));
    assert_eq!(g.alpha(2), Some(&q(2)));
    assert_eq!(g.nbar(2), GroupIndex::Finite(1));
    assert_eq!(g.n(2), Some(1));
    assert_eq!(g.key(2), &p(&g, "y^2 - x^3"));
    assert_eq!(g.monomial_name(g.u_exps(2).unwrap()), "x^2*y");
}

#[test]
fn v1_bad_data_fails_validation() {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let grp = ValueGroup::rational();
    let g = GenSeq::new(&ctx, &grp, v1_spec(ctx.tower(), Value::int(3), vec![3, 0])).unwrap();
    let rep = validate_sequence(&g).unwrap();
    assert_eq!(rep.find(Some(1), "value increase").unwrap().outcome, CheckOutcome::Fail);
    let g = GenSeq::new(&ctx, &grp, v1_spec(ctx.tower(), Value::frac(7, 2), vec![2, 0])).unwrap();
    let rep = validate_sequence(&g).unwrap();
    assert_eq!(rep.find(Some(1), "tail value").unwrap().outcome, CheckOutcome::Fail);
    assert!(!rep.passed());
}

#[test]
fn non_monic_tail_is_rejected() {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let mut spec = v1_spec(ctx.tower(), Value::frac(7, 2), vec![3, 0]);
    spec.steps[0].tail[0].exps = vec![0, 2];
    assert!(matches!(GenSeq::new(&ctx, &ValueGroup::rational(), spec), Err(GenSeqError::Malformed(_))));
}

#[test]
fn v1_expansions() {
    let g = v1(true);
    let e = expand(&p(&g, "y^2 + x^3"), &g).unwrap();
    let got: Vec<(TowerElem, Vec<u32>, Value)> = e.terms.iter().map(|t| (t.coeff.clone(), t.exps.clone(), t.value.clone())).collect();
    assert_eq!(got, vec![(q(1), vec![0, 0, 1], Value::frac(7, 2)), (q(2), vec![3, 0, 0], Value::int(3))]);
    let e = expand(&p(&g, "x"), &g).unwrap();
    assert_eq!(e.terms.len(), 1);
    assert_eq!((e.terms[0].exps.clone(), e.terms[0].value.clone()), (vec![1, 0, 0], Value::int(1)));
    let e = expand(&p(&g, "x^2*y"), &g).unwrap();
    assert_eq!((e.terms[0].exps.clone(), e.terms[0].value.clone()), (vec![2, 1, 0], Value::frac(7, 2)));
}

#[test]
fn v1_values() {
    let g = v1(true);
    assert_eq!(evaluate(&p(&g, "y^2 + x^3"), &g).unwrap(), Value::int(3));
    assert_eq!(evaluate(&p(&g, "y^2 - x^3"), &g).unwrap(), Value::frac(7, 2));
    let f = p(&g, "(y^2 - x^3)^2 - x^7");
    assert_eq!(evaluate(&f, &g).unwrap(), Value::int(7));
    let bare = v1(false);
    let f = p(&bare, "(y^2 - x^3)^2 - x^7");
    assert!(matches!(evaluate(&f, &bare), Err(GenSeqError::InsufficientData(_))));
    // the next key would be P2 - 2x^2y
    let h = p(&g, "y^2 - x^3 - 2*x^2*y");
    assert!(matches!(evaluate(&h, &g), Err(GenSeqError::InsufficientData(_))));
}

#[test]
fn residues_of_monomials() {
    let g = v1(true);
    assert_eq!(residue_of_monomial(&[-3, 2], &g).unwrap(), q(1));
    assert_eq!(residue_of_monomial(&[], &g).unwrap(), q(1));
    assert_eq!(residue_of_monomial(&[-6, 4], &g).unwrap(), q(1));
    assert_eq!(residue_of_monomial(&[-2, -1, 1], &g).unwrap(), q(2));
    assert!(matches!(residue_of_monomial(&[1, 0], &g), Err(GenSeqError::Precondition(_))));
}

#[test]
fn initial_forms() {
    let g = v1(true);
    let names = g.key_names();
    assert_eq!(initial_form(&p(&g, "y^2 + x^3"), &g).unwrap().render(&names), "2*in(x)^3");
    assert_eq!(initial_form(&p(&g, "x"), &g).unwrap().render(&names), "in(x)");
    assert_eq!(initial_form(&p(&g, "y^2 - x^3"), &g).unwrap().render(&names), "in(P2)");
}

#[test]
fn sigma_and_semigroup() {
    let g = v1(true);
    assert_eq!(sigma_indices(&g), vec![0, 1]);
    assert_eq!(semigroup_membership(&Value::frac(7, 2), &g).unwrap(), Some(vec![2, 1, 0]));
    assert_eq!(semigroup_membership(&Value::zero(), &g).unwrap(), Some(vec![0, 0, 0]));
    assert_eq!(semigroup_membership(&Value::frac(1, 3), &g).unwrap(), None);
}

#[test]
fn sigma_examples() {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let t = ctx.tower();
    let step = |n, tail: Vec<u32>, b| KeyStep {
        n,
        tail: vec![TailTerm { coeff: TowerElem::from_int(t, -1), exps: tail }],
        beta_next: b,
        alpha: None,
    };
    // all n_i = 1
    let spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::int(1),
        steps: vec![step(1, vec![1, 0], Value::int(2)), step(1, vec![2, 0, 0], Value::int(3))],
        top_alpha: Some(TowerElem::one(t)),
        terminated: false,
    };
    let g = GenSeq::new(&ctx, &ValueGroup::rational(), spec).unwrap();
    assert!(validate_sequence(&g).unwrap().passed());
    assert_eq!(sigma_indices(&g), vec![0]);
    // n_1 = 1, n_2 = 3
    let spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::int(1),
        steps: vec![step(1, vec![1, 0], Value::frac(4, 3)), step(3, vec![4, 0, 0], Value::int(5))],
        top_alpha: Some(TowerElem::one(t)),
        terminated: false,
    };
    let g = GenSeq::new(&ctx, &ValueGroup::rational(), spec).unwrap();
    let rep = validate_sequence(&g).unwrap();
    assert!(rep.passed(), "{rep}");
    assert_eq!(sigma_indices(&g), vec![0, 2]);
}

#[test]
fn residue_extension_is_adjoined() {
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
    assert_eq!(g.tower().num_levels(), 1);
    assert_eq!((g.nbar(1), g.d(1)), (GroupIndex::Finite(1), Some(2)));
    let rep = validate_sequence(&g).unwrap();
    assert!(rep.passed(), "{rep}");
    let i = g.alpha(1).unwrap().clone();
    assert_eq!(&i * &i, TowerElem::from_int(g.tower(), -1));
    assert_eq!(residue_of_monomial(&[-1, 1], &g).unwrap(), i);
    assert_eq!(evaluate(&p(&g, "y^2 + x^2"), &g).unwrap(), Value::frac(5, 2));
    assert_eq!(evaluate(&p(&g, "y^2 - x^2"), &g).unwrap(), Value::int(2));
    assert_eq!(evaluate(&p(&g, "y + x"), &g).unwrap(), Value::int(1));
    assert_eq!(sigma_indices(&g), vec![0, 1]);
    assert_eq!(semigroup_membership(&Value::int(2), &g).unwrap(), Some(vec![1, 1, 0]));
    let _ = rat(1, 2);
}

fn arb_poly() -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
    proptest::collection::vec((0u32..7, 0u32..5, -3i64..4), 1..6)
}

fn build(g: &GenSeq, t: &[(u32, u32, i64)]) -> RingElem {
    RingElem::from_terms(g.ctx(), t.iter().map(|&(i, j, k)| ((i, j), TowerElem::from_int(g.ctx().tower(), k))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn evaluate_matches_oracle(a in arb_poly()) {
        let g = v1(true);
        let f = build(&g, &a);
        prop_assume!(!f.is_zero());
        let emb = v1_oracle(g.ctx());
        if let (Ok(v), SeriesValue::Value(w)) = (evaluate(&f, &g), series_value(&f, &emb).unwrap()) {
            prop_assert_eq!(v, w);
        }
    }

    #[test]
    fn valuation_axioms(a in arb_poly(), b in arb_poly()) {
        let g = v1(true);
        let (f, h) = (build(&g, &a), build(&g, &b));
        prop_assume!(!f.is_zero() && !h.is_zero());
        let (Ok(vf), Ok(vh)) = (evaluate(&f, &g), evaluate(&h, &g)) else { return Ok(()) };
        prop_assert_eq!(evaluate(&(&f * &h), &g).unwrap(), &vf + &vh);
        let s = &f + &h;
        if !s.is_zero() {
            if let Ok(vs) = evaluate(&s, &g) {
                let m = g.group().min(&vf, &vh).unwrap().clone();
                prop_assert!(g.group().le(&m, &vs).unwrap());
                if vf != vh {
                    prop_assert_eq!(vs, m);
                }
            }
        }
    }

    #[test]
    fn expansion_reconstructs(a in arb_poly()) {
        let g = v1(true);
        let f = build(&g, &a);
        let e = expand(&f, &g).unwrap();
        prop_assert_eq!(e.reconstruct(&g), f.clone());
        prop_assert_eq!(expand(&f, &g).unwrap(), e);
    }

    #[test]
    fn values_lie_in_the_semigroup(a in arb_poly()) {
        let g = v1(true);
        let f = build(&g, &a);
        prop_assume!(!f.is_zero());
        if let Ok(v) = evaluate(&f, &g) {
            let rep = semigroup_membership(&v, &g).unwrap().unwrap();
            prop_assert_eq!(g.monomial_value(&rep), v);
        }
    }
}
