//! Acceptance criteria, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use valtool::arith::{group_index, int, GroupIndex, TowerElem, Value};
use valtool::blowup::{free_transform, iterate_transforms, strict_transform};
use valtool::extension::{ramification_report, splitting_report, Defect, ExtensionMap, Route, SplitOptions};
use valtool::fixtures::{self, ExtensionFixture};
use valtool::genseq::{evaluate, initial_form, GenSeq, GenSeqError};
use valtool::graded::{
    fingen_detect, graded_presentation, integral_relation, key_form, subalgebra_membership, AlignmentState, Certificate,
    ObstructionKind, Verdict,
};
use valtool::ring::{series_value, LocalRingCtx, RingElem, SeriesValue};

const FIXTURE_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_LIMIT: Duration = Duration::from_secs(10);
const OBSTRUCTION_LIMIT: Duration = Duration::from_secs(5);
const INTEGRAL_LIMIT: Duration = Duration::from_secs(5);
const SAMPLE: usize = 200;
const SEED: u64 = 20;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let r = f();
    let dt = t.elapsed();
    match r {
        Ok(note) if dt <= limit => Ok(format!("{note} [{dt:.2?}]")),
        Ok(note) => Err(format!("{note}, but took {dt:.2?} > {limit:?}")),
        Err(e) => Err(format!("{e} [{dt:.2?}]")),
    }
}

fn parse(g: &GenSeq, s: &str) -> RingElem {
    RingElem::parse(g.ctx(), s).unwrap()
}

/// `in(x)^2` lies in the graded image of R through `in(u)` with coefficient 1.
fn square_is_u(fx: &ExtensionFixture) -> Result<(), String> {
    let x = key_form(&fx.s, 0);
    let u = initial_form(&fx.ext.image(fx.r.key(0)).map_err(|e| e.to_string())?, &fx.s).map_err(|e| e.to_string())?;
    let k = fx.s.ctx().residue().clone();
    let m = subalgebra_membership(&x.pow(2), &[u], &fx.s, &k).map_err(|e| e.to_string())?;
    let want = Certificate::Representation(vec![(TowerElem::one(fx.s.tower()), vec![1])]);
    ensure(m.certificate == want, || format!("in(x)^2 = in(u) not certified: {:?}", m.certificate))
}

fn def2() -> Outcome {
    let fx = fixtures::def2();
    let rep = ramification_report(&fx.r, &fx.s, &fx.ext, 4).map_err(|e| e.to_string())?;
    ensure((rep.e, rep.f) == (1, 1), || format!("e = {}, f = {}", rep.e, rep.f))?;
    for route in [Route::Ostrowski, Route::LocalDegree] {
        let r = rep.routes.iter().find(|r| r.route == route).ok_or(format!("no {route} route"))?;
        ensure(r.delta == Defect::Known(1) && r.consistent, || format!("{route}: δ = {}", r.delta))?;
    }
    for (side, g) in [("R", &fx.r), ("S", &fx.s)] {
        let p = graded_presentation(g, 6).map_err(|e| e.to_string())?;
        ensure(p.generators.len() == 1 && p.relations.is_empty(), || format!("{side} presentation:\n{p}"))?;
    }
    Ok("e = 1, f = 1, δ = 1 by both routes, gr = k[t] on both sides".into())
}

fn pi2() -> Outcome {
    let fx = fixtures::pi2();
    let vu = evaluate(&parse(&fx.r, "u"), &fx.r).map_err(|e| e.to_string())?;
    let vvu = evaluate(&parse(&fx.r, "v - u"), &fx.r).map_err(|e| e.to_string())?;
    ensure(vu == Value::new(int(2), int(0)), || format!("ν(u) = {vu}"))?;
    ensure(vvu == Value::new(int(2), int(1)), || format!("ν(v - u) = {vvu}"))?;
    let e = group_index(fx.s.betas(), fx.r.betas()).map_err(|e| e.to_string())?;
    ensure(e == GroupIndex::Finite(2), || format!("group index {e}"))?;
    let sp = splitting_report(&fx.candidates, &fx.ext, &fx.r, &SplitOptions::default()).map_err(|e| e.to_string())?;
    ensure(sp.distinct() >= 2, || format!("{sp}"))?;
    let st = fingen_detect(&fx.r, &fx.s, &fx.ext, 4).map_err(|e| e.to_string())?;
    ensure(st.is_consistent(), || format!("{st}"))?;
    let pres = graded_presentation(&fx.s, 4).map_err(|e| e.to_string())?;
    let gens: Vec<String> = pres.generators.iter().map(|g| fx.s.key(g.key).to_string()).collect();
    let want = [parse(&fx.s, "x").to_string(), parse(&fx.s, "y - x").to_string()];
    ensure(gens == want, || format!("generators {gens:?}"))?;
    square_is_u(&fx)?;
    Ok(format!("ν(u) = {vu}, ν(v - u) = {vvu}, e = 2, {} extensions, in(x), in(y - x), in(x)^2 = in(u)", sp.distinct()))
}

fn disc() -> Outcome {
    let fx = fixtures::disc();
    let sp = splitting_report(&fx.candidates, &fx.ext, &fx.r, &SplitOptions::default()).map_err(|e| e.to_string())?;
    ensure(sp.splitting(), || format!("{sp}"))?;
    square_is_u(&fx)?;
    Ok(format!("{} extensions, in(x)^2 = in(u)", sp.distinct()))
}

fn random_poly(ctx: &std::sync::Arc<LocalRingCtx>, rng: &mut ChaCha8Rng) -> RingElem {
    loop {
        let mut f = RingElem::zero(ctx);
        for i in 0..=6u32 {
            for j in 0..=4u32 {
                if i + j > 0 && rng.gen_bool(0.25) {
                    let c = rng.gen_range(-3..=3i64);
                    f = &f + &RingElem::monomial(ctx, i, j, TowerElem::from_int(ctx.tower(), c));
                }
            }
        }
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random V1 sample with values from both sides.
struct Sample {
    g: GenSeq,
    items: Vec<(RingElem, Option<Value>, Option<Value>)>,
}

fn sample() -> Sample {
    let g = fixtures::v1();
    let emb = fixtures::v1_series(g.ctx());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let items = (0..SAMPLE)
        .map(|_| {
            let f = random_poly(g.ctx(), &mut rng);
            let a = match evaluate(&f, &g) {
                Ok(v) => Some(v),
                Err(GenSeqError::InsufficientData(_)) => None,
                Err(e) => panic!("{f}: {e}"),
            };
            let b = match series_value(&f, &emb).unwrap() {
                SeriesValue::Value(v) => Some(v),
                SeriesValue::InsufficientPrecision { .. } => None,
            };
            (f, a, b)
        })
        .collect();
    Sample { g, items }
}

fn oracle_equivalence() -> Outcome {
    let s = sample();
    let mut decided = 0;
    let mut short = 0;
    let mut imprecise = 0;
    for (f, a, b) in &s.items {
        match (a, b) {
            (Some(a), Some(b)) => {
                ensure(a == b, || format!("{f}: evaluate {a}, series {b}"))?;
                decided += 1;
            }
            (None, _) => short += 1,
            (_, None) => imprecise += 1,
        }
    }
    let rate = 100.0 * imprecise as f64 / SAMPLE as f64;
    Ok(format!(
        "{decided} decided, 0 disagreements, {short} beyond the keys, InsufficientPrecision rate {rate:.1}%"
    ))
}

fn axioms() -> Outcome {
    let s = sample();
    let emb = fixtures::v1_series(s.g.ctx());
    let value = |f: &RingElem| -> Option<Value> {
        match evaluate(f, &s.g) {
            Ok(v) => Some(v),
            Err(_) => series_value(f, &emb).ok()?.value().cloned(),
        }
    };
    let grp = s.g.group();
    let mut checked = 0;
    for w in s.items.windows(2) {
        let (f, g) = (&w[0].0, &w[1].0);
        let (Some(vf), Some(vg)) = (value(f), value(g)) else { continue };
        let vfg = value(&(f * g)).ok_or(format!("ν({f} * {g}) unknown"))?;
        ensure(vfg == &vf + &vg, || format!("ν(fg) = {vfg} for f = {f}, g = {g}"))?;
        let sum = f + g;
        if !sum.is_zero() {
            let vs = value(&sum).ok_or(format!("ν({sum}) unknown"))?;
            let m = grp.min(&vf, &vg).unwrap().clone();
            ensure(grp.le(&m, &vs).unwrap(), || format!("ν(f + g) = {vs} < {m}"))?;
            if vf != vg {
                ensure(vs == m, || format!("ν(f + g) = {vs}, expected {m}"))?;
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} pairs, 0 violations"))
}

fn transform() -> Outcome {
    let g = fixtures::v1();
    let (m, h) = free_transform(&g).map_err(|e| e.to_string())?;
    ensure(m.forward() == [(2, -1), (-3, 2)], || format!("forward {:?}", m.forward()))?;
    ensure(h.beta(0) == &Value::frac(1, 2), || format!("ν(x1) = {}", h.beta(0)))?;
    // In the chart the strict transform of P2 is a unit times y1 - 1.
    let img = m.pull_to_chart(g.key(2)).map_err(|e| e.to_string())?;
    let st = img.div_monomial(img.x_order().unwrap(), img.y_order().unwrap());
    let line = RingElem::parse(m.chart(), &format!("{} - 1", m.chart().params()[1])).unwrap();
    let (q, r) = st.divrem_monic_y(&line);
    ensure(r.is_zero() && q.is_unit(), || format!("strict transform {st}"))?;
    let target = strict_transform(g.key(2), &m).map_err(|e| e.to_string())?;
    ensure(target == RingElem::y(m.target()), || format!("strict transform upstairs {target}"))?;
    let rec = iterate_transforms(&g, 1);
    let step = rec.steps.first().ok_or("no step")?;
    for row in &step.table {
        ensure(h.nbar(row.level) == g.nbar(row.level + 1), || format!("n̄ at level {}", row.level))?;
    }
    ensure(rec.holds(), || format!("{rec}"))?;
    Ok(format!("x1 = x^2y^-1, y1 = x^-3y^2, ν(x1) = 1/2, strict transform {target}, {} shift rows", step.table.len()))
}

fn cor_pair() -> Result<(GenSeq, GenSeq, ExtensionMap), String> {
    let g = fixtures::cor_n32(9);
    let (m, h) = free_transform(&g).map_err(|e| e.to_string())?;
    let imgs = [RingElem::x(g.ctx()), RingElem::y(g.ctx())].map(|v| m.to_target(&m.pull_to_chart(&v).unwrap()));
    let ext = ExtensionMap::new(g.ctx(), imgs, 1, 0).map_err(|e| e.to_string())?;
    Ok((g, h, ext))
}

fn obstruction() -> Outcome {
    let (g, h, ext) = cor_pair()?;
    for d in 1..=6 {
        let st = fingen_detect(&g, &h, &ext, d).map_err(|e| e.to_string())?;
        ensure(st.verdict == Verdict::ObstructionAt(d, ObstructionKind::NewGeneratorRequired), || format!("depth {d}: {st}"))?;
        let w = st.witness.as_ref().ok_or(format!("depth {d}: no membership witness"))?;
        ensure(!w.member, || format!("depth {d}: witness is a member"))?;
    }
    Ok("ObstructionAt(d) at d = 1..6, each witness outside the subalgebra".into())
}

fn integrality() -> Outcome {
    let fx = fixtures::def2();
    let ctx = fx.s.ctx().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut degrees = Vec::new();
    for _ in 0..20 {
        let f = loop {
            let f = random_poly(&ctx, &mut rng);
            if !f.is_zero() && f.in_max_ideal() {
                break f;
            }
        };
        let rel = integral_relation(&f, &fx.r, &fx.s, &fx.ext).map_err(|e| format!("{f}: {e}"))?;
        ensure(rel.vanishes && rel.minpoly.last().is_some_and(|c| c.is_one()), || format!("{f}: {rel}"))?;
        degrees.push(rel.degree());
    }
    Ok(format!("20 monic relations vanish, degrees {degrees:?}"))
}

fn lambda_chi(st: &AlignmentState) -> Option<u64> {
    let l = st.levels.last()?;
    Some(l.lambda.finite()? * l.chi as u64)
}

fn residue_dim(g: &GenSeq) -> usize {
    g.residue_through(g.top()).dimension(g.tower()).unwrap()
}

fn monotonicity() -> Outcome {
    let mut runs = 0;
    let mut identities = 0;
    let mut fixtures_list = vec![("DEF2", fixtures::def2()), ("PI2", fixtures::pi2()), ("DISC", fixtures::disc())];
    let v1 = fixtures::v1();
    fixtures_list.push((
        "V1",
        ExtensionFixture { r: v1.clone(), s: v1.clone(), ext: ExtensionMap::identity(v1.ctx()), candidates: Vec::new() },
    ));
    for (name, fx) in &fixtures_list {
        let e = group_index(fx.s.betas(), fx.r.betas()).map_err(|e| e.to_string())?;
        let f = residue_dim(&fx.s) / residue_dim(&fx.r);
        for d in 0..=4 {
            let st = fingen_detect(&fx.r, &fx.s, &fx.ext, d).map_err(|e| e.to_string())?;
            ensure(st.monotone, || format!("{name} depth {d}: not monotone\n{st}"))?;
            runs += 1;
            if st.is_consistent() && d == 4 {
                let ef = e.finite().ok_or(format!("{name}: infinite index"))? * f as u64;
                ensure(lambda_chi(&st) == Some(ef), || format!("{name}: λχ = {:?}, e·f = {ef}", lambda_chi(&st)))?;
                identities += 1;
            }
        }
    }
    let (g, h, ext) = cor_pair()?;
    for d in 1..=6 {
        let st = fingen_detect(&g, &h, &ext, d).map_err(|e| e.to_string())?;
        ensure(st.monotone, || format!("CorN32 depth {d}: not monotone\n{st}"))?;
        runs += 1;
    }
    Ok(format!("{runs} alignment runs monotone, λ·χ = e·f on {identities} consistent verdicts"))
}

fn main() {
    let criteria: [(&str, Box<dyn Fn() -> Outcome>); 9] = [
        ("DEF2 defect extension", Box::new(|| timed(FIXTURE_LIMIT, def2))),
        ("PI2 splitting in rank two", Box::new(|| timed(FIXTURE_LIMIT, pi2))),
        ("DISC splitting", Box::new(|| timed(FIXTURE_LIMIT, disc))),
        ("oracle equivalence on V1", Box::new(|| timed(ORACLE_LIMIT, oracle_equivalence))),
        ("valuation axioms on V1", Box::new(|| timed(ORACLE_LIMIT, axioms))),
        ("free transform of V1", Box::new(|| timed(FIXTURE_LIMIT, transform))),
        ("non-finitely generated witness", Box::new(|| timed(OBSTRUCTION_LIMIT, obstruction))),
        ("integral relations on DEF2", Box::new(|| timed(INTEGRAL_LIMIT, integrality))),
        ("monotonicity and λ·χ = e·f", Box::new(|| timed(Duration::MAX, monotonicity))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("PASS {} {name}: {note}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
