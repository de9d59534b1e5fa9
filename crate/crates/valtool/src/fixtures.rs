//! Ready-made valuations used by the examples and test suites.

use std::sync::Arc;

use crate::arith::{int, rat, IrrationalDescriptor, ResidueTower, TowerElem, Value, ValueGroup};
use crate::extension::{Candidate, ExtensionMap};
use crate::genseq::{GenSeq, GenSeqSpec, KeyStep, TailTerm};
use crate::ring::{LocalRingCtx, RingElem, SeriesEmbedding, TruncSeries};

/// `x ↦ t²`, `y ↦ t³ + t⁴` over ℚ, with `ν(x) = 1`.
pub fn v1_series(ctx: &Arc<LocalRingCtx>) -> SeriesEmbedding {
    let t = ctx.tower();
    let one = TowerElem::one(t);
    let x = TruncSeries::new(t, [(2, one.clone())], None);
    let y = TruncSeries::new(t, [(3, one.clone()), (4, one)], None);
    SeriesEmbedding::new(ctx, 1, [x, y], (0, int(1))).expect("valid embedding")
}

/// Keys `x`, `y`, `y² − x³` with values `1, 3/2, 7/2`; the residue of the
/// last key comes from [`v1_series`].
pub fn v1() -> GenSeq {
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).expect("ring");
    let t = ctx.tower();
    let spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::frac(3, 2),
        steps: vec![KeyStep {
            n: 2,
            tail: vec![TailTerm { coeff: TowerElem::from_int(t, -1), exps: vec![3, 0] }],
            beta_next: Value::frac(7, 2),
            alpha: None,
        }],
        top_alpha: None,
        terminated: false,
    };
    let oracle = Arc::new(v1_series(&ctx));
    GenSeq::new(&ctx, &ValueGroup::rational(), spec).and_then(|g| g.with_oracle(oracle)).expect("V1")
}

/// `keys` keys with `n_i = 2`, `P_{i+1} = P_i² − U_i` and
/// `β_{i+1} = 2β_i + 2^{−(i+1)}`, starting from `1, 3/2`. Every residue is 1,
/// the last one by declaration. The value group is not finitely generated
/// in the limit.
pub fn cor_n32(keys: usize) -> GenSeq {
    assert!(keys >= 3, "needs at least three keys");
    let ctx = LocalRingCtx::new("R", &ResidueTower::rational(), ["x", "y"]).expect("ring");
    let grp = ValueGroup::rational();
    let one = TowerElem::one(ctx.tower());
    let mut spec = GenSeqSpec {
        beta0: Value::int(1),
        beta1: Value::frac(3, 2),
        steps: Vec::new(),
        top_alpha: Some(one.clone()),
        terminated: false,
    };
    let mut beta = Value::frac(3, 2);
    for i in 1..keys - 1 {
        let g = GenSeq::new(&ctx, &grp, spec.clone()).expect("prefix");
        let mut u = g.u_exps(i).expect("U_i").to_vec();
        u.push(0);
        beta = &beta.times(2) + &Value::rational(rat(1, 1 << (i + 1)));
        spec.steps.push(KeyStep {
            n: 2,
            tail: vec![TailTerm { coeff: -&one, exps: u }],
            beta_next: beta.clone(),
            alpha: None,
        });
    }
    GenSeq::new(&ctx, &grp, spec).expect("CorN32")
}

/// An extension `R → S` with sequences on both sides and the candidate
/// valuations of S.
#[derive(Clone, Debug)]
pub struct ExtensionFixture {
    pub r: GenSeq,
    pub s: GenSeq,
    pub ext: ExtensionMap,
    pub candidates: Vec<Candidate>,
}

/// Sequence with `n_i = 1` throughout: `P_{i+1} = P_i + c_i·x^{e_i}`.
fn linear_seq(ctx: &Arc<LocalRingCtx>, grp: &ValueGroup, betas: &[Value], tails: &[(TowerElem, u32)]) -> GenSeq {
    let steps = tails
        .iter()
        .enumerate()
        .map(|(i, (c, e))| {
            let mut exps = vec![0; i + 2];
            exps[0] = *e;
            KeyStep { n: 1, tail: vec![TailTerm { coeff: c.clone(), exps }], beta_next: betas[i + 2].clone(), alpha: None }
        })
        .collect();
    let spec = GenSeqSpec {
        beta0: betas[0].clone(),
        beta1: betas[1].clone(),
        steps,
        top_alpha: None,
        terminated: false,
    };
    GenSeq::new(ctx, grp, spec).expect("fixture sequence")
}

fn series(t: &Arc<ResidueTower>, terms: impl IntoIterator<Item = (i64, TowerElem)>, precision: Option<i64>) -> TruncSeries {
    TruncSeries::new(t, terms, precision)
}

/// Characteristic 2: `u ↦ x`, `v ↦ y²`, with
/// `y ↦ t + t³ + t⁷ + ⋯ + t⁶³` known modulo `t¹²⁷`. Field degree 2,
/// unique extension.
pub fn def2() -> ExtensionFixture {
    let f2 = ResidueTower::prime(2).expect("F2");
    let one = TowerElem::one(&f2);
    let grp = ValueGroup::rational();

    let s_ctx = LocalRingCtx::new("S", &f2, ["x", "y"]).expect("ring");
    let gaps: Vec<i64> = (1..=6).map(|k| (1 << k) - 1).collect();
    let s_betas: Vec<Value> = [1].into_iter().chain(gaps.iter().copied()).map(Value::int).collect();
    let s_tails: Vec<(TowerElem, u32)> = gaps[..5].iter().map(|&e| (one.clone(), e as u32)).collect();
    let ys = series(&f2, gaps.iter().map(|&e| (e, one.clone())), Some(127));
    let xs = series(&f2, [(1, one.clone())], None);
    let emb = SeriesEmbedding::new(&s_ctx, 1, [xs, ys], (0, int(1))).expect("embedding");
    let s = linear_seq(&s_ctx, &grp, &s_betas, &s_tails).with_oracle(Arc::new(emb)).expect("S sequence");

    let r_ctx = LocalRingCtx::new("R", &f2, ["u", "v"]).expect("ring");
    let r_betas: Vec<Value> = [1].into_iter().chain(gaps[..6].iter().map(|e| 2 * e)).map(Value::int).collect();
    let r_tails: Vec<(TowerElem, u32)> = gaps[..4].iter().map(|&e| (one.clone(), 2 * e as u32)).collect();
    let vs = series(&f2, gaps.iter().chain([127].iter()).map(|&e| (2 * e, one.clone())), Some(254));
    let us = series(&f2, [(1, one.clone())], None);
    let emb = SeriesEmbedding::new(&r_ctx, 1, [us, vs], (0, int(1))).expect("embedding");
    let r = linear_seq(&r_ctx, &grp, &r_betas[..6], &r_tails).with_oracle(Arc::new(emb)).expect("R sequence");

    let ext = ExtensionMap::new(&r_ctx, [RingElem::x(&s_ctx), RingElem::y(&s_ctx).pow(2)], 2, 2)
        .expect("map")
        .with_unique(true);
    ExtensionFixture { r, s: s.clone(), ext, candidates: vec![Candidate::seq("nu", s)] }
}

/// `R = k[u,v] → S = k[x,y]`, `u ↦ x²`, `v ↦ y²` in characteristic 0,
/// with the pair one blowup further along the valuation where the map is
/// `u₁ ↦ x₁²`, `v₁ ↦ z₁² + 2z₁`.
fn squares_map(r_ctx: &Arc<LocalRingCtx>, s_ctx: &Arc<LocalRingCtx>) -> ExtensionMap {
    let q = ResidueTower::rational();
    let r1 = LocalRingCtx::new("R1", &q, ["u1", "v1"]).expect("ring");
    let s1 = LocalRingCtx::new("S1", &q, ["x1", "z1"]).expect("ring");
    let level = ExtensionMap::new(
        &r1,
        [RingElem::parse(&s1, "x1^2").expect("image"), RingElem::parse(&s1, "z1^2 + 2*z1").expect("image")],
        4,
        0,
    )
    .expect("map");
    ExtensionMap::new(r_ctx, [RingElem::x(s_ctx).pow(2), RingElem::y(s_ctx).pow(2)], 4, 0)
        .expect("map")
        .with_local_level(level)
}

/// Rational rank two: `ν(u) = ν(v) = 2`, `ν(v − u) = π + 2` on R, and
/// the two extensions `ν₁(y − x) = π + 1`, `ν₂(y + x) = π + 1` on S.
pub fn pi2() -> ExtensionFixture {
    let q = ResidueTower::rational();
    let grp = ValueGroup::with_irrational(IrrationalDescriptor::pi("pi"));
    let pi_plus = |k: i64| Value::new(int(k), int(1));
    let seq = |ctx: &Arc<LocalRingCtx>, b: i64, sign: i64| {
        let spec = GenSeqSpec {
            beta0: Value::int(b),
            beta1: Value::int(b),
            steps: vec![KeyStep {
                n: 1,
                tail: vec![TailTerm { coeff: TowerElem::from_int(&q, sign), exps: vec![1, 0] }],
                beta_next: pi_plus(b),
                alpha: None,
            }],
            top_alpha: None,
            terminated: true,
        };
        GenSeq::new(ctx, &grp, spec).expect("fixture sequence")
    };
    let s_ctx = LocalRingCtx::new("S", &q, ["x", "y"]).expect("ring");
    let r_ctx = LocalRingCtx::new("R", &q, ["u", "v"]).expect("ring");
    let nu1 = seq(&s_ctx, 1, -1);
    let nu2 = seq(&s_ctx, 1, 1);
    let r = seq(&r_ctx, 2, -1);
    let ext = squares_map(&r_ctx, &s_ctx);
    ExtensionFixture { r, s: nu1.clone(), ext, candidates: vec![Candidate::seq("nu1", nu1), Candidate::seq("nu2", nu2)] }
}

fn factorial(n: i64) -> i64 {
    (1..=n).product()
}

/// Discrete rank one: `ν` from the curve `v = u·p(u)` with
/// `p(u) = Σ_{j≤8} u^j/j!`, and its two extensions along the branches
/// `y = ±x·√p(x²)`. Units of S: `ν(x) = 1`, `ν(u) = 2`.
pub fn disc() -> ExtensionFixture {
    let q = ResidueTower::rational();
    let grp = ValueGroup::rational();
    let c = |n: i64, d: i64| TowerElem::from_rat(&q, &rat(n, d)).expect("rational");

    let r_ctx = LocalRingCtx::new("R", &q, ["u", "v"]).expect("ring");
    let r_betas: Vec<Value> = (0..=9).map(|k| Value::int(2 * k.max(1))).collect();
    let r_tails: Vec<(TowerElem, u32)> = (0..8).map(|j| (c(-1, factorial(j)), j as u32 + 1)).collect();
    let vs = series(&q, (0..=8).map(|j| (j + 1, c(1, factorial(j)))), Some(10));
    let us = series(&q, [(1, TowerElem::one(&q))], None);
    let emb = SeriesEmbedding::new(&r_ctx, 1, [us, vs], (0, int(2))).expect("embedding");
    let r = linear_seq(&r_ctx, &grp, &r_betas, &r_tails).with_oracle(Arc::new(emb)).expect("R sequence");

    let s_ctx = LocalRingCtx::new("S", &q, ["x", "y"]).expect("ring");
    let branch = |sign: i64| {
        let ys = series(&q, (0..=8).map(|j| (2 * j + 1, c(sign, (1 << j) * factorial(j)))), Some(19));
        let xs = series(&q, [(1, TowerElem::one(&q))], None);
        SeriesEmbedding::new(&s_ctx, 1, [xs, ys], (0, int(1))).expect("embedding")
    };
    let s_betas: Vec<Value> = (0..=9).map(|k| Value::int((2 * k - 1).max(1))).collect();
    let s_tails: Vec<(TowerElem, u32)> = (0..8).map(|j| (c(-1, (1 << j) * factorial(j)), 2 * j as u32 + 1)).collect();
    let s = linear_seq(&s_ctx, &grp, &s_betas, &s_tails).with_oracle(Arc::new(branch(1))).expect("S sequence");
    let ext = squares_map(&r_ctx, &s_ctx);
    ExtensionFixture {
        r,
        s,
        ext,
        candidates: vec![Candidate::series("nu1", branch(1)), Candidate::series("nu2", branch(-1))],
    }
}
