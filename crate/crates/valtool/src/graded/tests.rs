use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::arith::{ResidueTower, TowerElem, Value, ValueGroup};
use crate::blowup::free_transform;
use crate::extension::ExtensionMap;
use crate::fixtures;
use crate::genseq::tests::v1;
use crate::genseq::{initial_form, GenSeqSpec, KeyStep, TailTerm};
use crate::ring::{LocalRingCtx, RingElem};

fn p(g: &GenSeq, s: &str) -> RingElem {
    RingElem::parse(g.ctx(), s).unwrap()
}

fn rational_field(g: &GenSeq) -> Subfield {
    g.ctx().residue().clone()
}

#[test]
fn v1_presentation() {
    let g = v1(false);
    let pres = graded_presentation(&g, 2).unwrap();
    let names: Vec<_> = pres.generators.iter().map(|x| x.name.as_str()).collect();
    assert_eq!(names.len(), 3);
    assert_eq!(pres.relations.len(), 1);
    let r = &pres.relations[0];
    assert_eq!(r.level, 1);
    assert_eq!(r.value, Value::int(3));
    assert_eq!(pres.relation_text(r), "in(y)^2 - in(x)^3 = 0");
    assert_eq!(r.vanishes, Some(true));
    assert!(pres.holds());
}

#[test]
fn relations_survive_a_capped_depth() {
    // With the series n_2 = 1 is known, so P2 is no generator but the
    // level-1 relation still holds.
    let pres = graded_presentation(&v1(true), 5).unwrap();
    assert_eq!(pres.depth, 1);
    assert_eq!(pres.generators.len(), 2);
    assert_eq!(pres.relations.len(), 1);
    assert_eq!(pres.relation_text(&pres.relations[0]), "in(y)^2 - in(x)^3 = 0");
    assert!(graded_presentation(&v1(true), 1).unwrap().relations.is_empty());
}

#[test]
fn depth_zero_presentation_is_x_alone() {
    let pres = graded_presentation(&v1(false), 0).unwrap();
    assert_eq!(pres.generators.len(), 1);
    assert_eq!(pres.generators[0].value, Value::int(1));
    assert!(pres.relations.is_empty());
}

#[test]
fn def2_presentations_have_one_generator() {
    let fx = fixtures::def2();
    for g in [&fx.r, &fx.s] {
        let pres = graded_presentation(g, 6).unwrap();
        assert_eq!(pres.generators.len(), 1, "{pres}");
        assert!(pres.relations.is_empty());
        assert!(pres.to_string().contains("no relations"));
    }
}

#[test]
fn piece_bases() {
    let g = v1(false);
    assert_eq!(graded_piece_basis(&Value::int(3), &g, 2).unwrap(), vec![vec![3, 0, 0]]);
    assert_eq!(graded_piece_basis(&Value::frac(7, 2), &g, 2).unwrap(), vec![vec![0, 0, 1], vec![2, 1, 0]]);
    assert!(graded_piece_basis(&Value::frac(1, 3), &g, 2).unwrap().is_empty());
    // With the series the last key has a known n and stops being a frontier key.
    let h = v1(true);
    assert_eq!(graded_piece_basis(&Value::frac(7, 2), &h, 5).unwrap(), vec![vec![2, 1]]);
}

#[test]
fn membership_in_the_graded_ring() {
    let g = v1(false);
    let t = g.tower().clone();
    let x = key_form(&g, 0);
    let y = key_form(&g, 1);
    let k = rational_field(&g);
    // in(y)^2 = in(x)^3 in the graded ring.
    let m = subalgebra_membership(&y.pow(2), std::slice::from_ref(&x), &g, &k).unwrap();
    assert!(m.member);
    match m.certificate {
        Certificate::Representation(rep) => assert_eq!(rep, vec![(TowerElem::one(&t), vec![3])]),
        other => panic!("{other:?}"),
    }
    let m = subalgebra_membership(&y, std::slice::from_ref(&x), &g, &k).unwrap();
    assert!(!m.member);
    assert_eq!(m.certificate, Certificate::Failure { monomials: 0, rank: 0 });
    let m = subalgebra_membership(&x.pow(3).scale(&TowerElem::from_int(&t, 5)), &[x.pow(3)], &g, &k).unwrap();
    assert!(m.member);
}

#[test]
fn membership_rejects_nonpositive_generators() {
    let g = v1(false);
    let one = GradedElem::one(g.tower());
    let x = key_form(&g, 0);
    assert!(matches!(
        subalgebra_membership(&x, &[one], &g, &rational_field(&g)),
        Err(GradedError::Precondition(_))
    ));
}

#[test]
fn identity_alignment() {
    let g = v1(true);
    let ext = ExtensionMap::identity(g.ctx());
    let st = fingen_detect(&g, &g, &ext, 3).unwrap();
    assert!(st.is_consistent(), "{st}");
    assert!(st.gr_equal && st.monotone);
    assert_eq!((st.e(), st.f()), (Some(1), Some(1)));
    for l in &st.levels {
        assert_eq!(l.lambda, GroupIndex::Finite(1));
        assert_eq!(l.chi, 1);
    }
}

#[test]
fn pi2_alignment() {
    let fx = fixtures::pi2();
    let st = fingen_detect(&fx.r, &fx.s, &fx.ext, 4).unwrap();
    assert_eq!(st.verdict, Verdict::ConsistentWithFinGen(1), "{st}");
    assert_eq!((st.e(), st.f()), (Some(2), Some(1)));
    assert!(st.monotone);
    let vals: Vec<_> = st.images.iter().map(|i| i.2.clone()).collect();
    assert_eq!(vals, vec![Value::int(2), Value::int(2), Value::new(crate::arith::int(2), crate::arith::int(1))]);
    // in(x)^2 = in(u).
    let x = key_form(&fx.s, 0);
    let u = initial_form(&fx.ext.image(fx.r.key(0)).unwrap(), &fx.s).unwrap();
    let m = subalgebra_membership(&x.pow(2), &[u], &fx.s, &rational_field(&fx.s)).unwrap();
    assert_eq!(m.certificate, Certificate::Representation(vec![(TowerElem::one(fx.s.tower()), vec![1])]));
}

#[test]
fn def2_alignment() {
    let fx = fixtures::def2();
    let st = fingen_detect(&fx.r, &fx.s, &fx.ext, 4).unwrap();
    assert!(st.is_consistent(), "{st}");
    assert!(st.gr_equal);
    assert_eq!((st.e(), st.f()), (Some(1), Some(1)));
}

#[test]
fn disc_alignment() {
    let fx = fixtures::disc();
    let st = fingen_detect(&fx.r, &fx.s, &fx.ext, 4).unwrap();
    assert!(st.is_consistent(), "{st}");
    assert_eq!((st.e(), st.f()), (Some(2), Some(1)));
    assert!(st.monotone);
}

fn cor_pair() -> (GenSeq, GenSeq, ExtensionMap) {
    let g = fixtures::cor_n32(9);
    let (m, h) = free_transform(&g).unwrap();
    let imgs = [RingElem::x(g.ctx()), RingElem::y(g.ctx())].map(|v| m.to_target(&m.pull_to_chart(&v).unwrap()));
    let ext = ExtensionMap::new(g.ctx(), imgs, 1, 0).unwrap();
    (g, h, ext)
}

#[test]
fn cor_n32_obstructed_at_every_depth() {
    let (g, h, ext) = cor_pair();
    for d in 1..=6 {
        let st = fingen_detect(&g, &h, &ext, d).unwrap();
        assert_eq!(st.verdict, Verdict::ObstructionAt(d, ObstructionKind::NewGeneratorRequired), "{st}");
        assert!(!st.witness.as_ref().unwrap().member);
        assert!(st.monotone, "{st}");
    }
}

#[test]
fn restriction_mismatch_is_reported() {
    let g = v1(true);
    let ctx = g.ctx();
    let ext = ExtensionMap::new(ctx, [RingElem::x(ctx).pow(2), RingElem::y(ctx)], 2, 0).unwrap();
    let st = fingen_detect(&g, &g, &ext, 2).unwrap();
    assert_eq!(st.verdict, Verdict::ObstructionAt(0, ObstructionKind::RestrictionMismatch(0)));
}

#[test]
fn integral_relation_def2() {
    let fx = fixtures::def2();
    let rel = integral_relation(&p(&fx.s, "y"), &fx.r, &fx.s, &fx.ext).unwrap();
    assert_eq!(rel.degree(), 1);
    assert!(rel.xi.is_one());
    assert!(rel.vanishes);
    let rel = integral_relation(&p(&fx.s, "x"), &fx.r, &fx.s, &fx.ext).unwrap();
    assert_eq!((rel.n1, rel.a, rel.b), (1, 1, 1));
    assert_eq!(rel.to_string(), "in(f) + in(u) = 0");
    assert!(matches!(
        integral_relation(&p(&fx.s, "1 + x"), &fx.r, &fx.s, &fx.ext),
        Err(GradedError::Precondition(_))
    ));
}

fn random_nonunit(ctx: &Arc<LocalRingCtx>, rng: &mut ChaCha8Rng) -> RingElem {
    loop {
        let mut f = RingElem::zero(ctx);
        for _ in 0..rng.gen_range(1..=5) {
            let (i, j) = (rng.gen_range(0..=6u32), rng.gen_range(0..=4u32));
            if i + j > 0 {
                f = &f + &RingElem::monomial(ctx, i, j, TowerElem::one(ctx.tower()));
            }
        }
        if !f.is_zero() {
            return f;
        }
    }
}

#[test]
fn integral_relations_vanish_on_random_def2_elements() {
    let fx = fixtures::def2();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let f = random_nonunit(fx.s.ctx(), &mut rng);
        let rel = integral_relation(&f, &fx.r, &fx.s, &fx.ext).unwrap();
        assert!(rel.vanishes, "{f}: {rel}");
        assert!(rel.minpoly.last().unwrap().is_one());
    }
}

#[test]
fn integral_relation_with_residue_extension() {
    let q = ResidueTower::rational();
    let s_ctx = LocalRingCtx::new("S", &q, ["x", "y"]).unwrap();
    let spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::int(1),
        steps: vec![KeyStep {
            n: 2,
            tail: vec![TailTerm { coeff: TowerElem::one(&q), exps: vec![2, 0] }],
            beta_next: Value::frac(5, 2),
            alpha: None,
        }],
        top_alpha: None,
        terminated: false,
    };
    let s = GenSeq::new(&s_ctx, &ValueGroup::rational(), spec).unwrap();
    let r_ctx = LocalRingCtx::new("R", &q, ["u", "v"]).unwrap();
    let r_spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::int(2),
        steps: Vec::new(),
        top_alpha: None,
        terminated: false,
    };
    let r = GenSeq::new(&r_ctx, &ValueGroup::rational(), r_spec).unwrap();
    let ext = ExtensionMap::new(&r_ctx, [RingElem::x(&s_ctx), RingElem::x(&s_ctx).pow(2)], 2, 0).unwrap();
    let rel = integral_relation(&RingElem::y(&s_ctx), &r, &s, &ext).unwrap();
    assert_eq!(rel.degree(), 2);
    assert!(rel.vanishes);
    assert_eq!(rel.to_string(), "in(f)^2 + in(u)^2 = 0");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn def2_relations_vanish(seed in any::<u64>()) {
        let fx = fixtures::def2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_nonunit(fx.s.ctx(), &mut rng);
        let rel = integral_relation(&f, &fx.r, &fx.s, &fx.ext).unwrap();
        prop_assert!(rel.vanishes);
    }

    #[test]
    fn basis_monomials_have_the_right_value(num in 1i64..40, den in 1i64..5) {
        let g = v1(false);
        let gamma = Value::frac(num, den);
        for e in graded_piece_basis(&gamma, &g, 2).unwrap() {
            prop_assert_eq!(g.monomial_value(&e), gamma.clone());
        }
    }

    #[test]
    fn products_of_generators_are_members(a in 0u32..5, b in 0u32..4) {
        prop_assume!(a + b > 0);
        let g = v1(false);
        let x = key_form(&g, 0);
        let y = key_form(&g, 1);
        let e = x.pow(a).mul(&y.pow(b));
        let m = subalgebra_membership(&e, &[x, y], &g, &rational_field(&g)).unwrap();
        prop_assert!(m.member);
    }
}
