use super::*;
use crate::arith::ResidueTower;
use crate::fixtures;
use crate::genseq::tests::v1;
use crate::ring::{LocalRingCtx, RingElem};

fn form(a: u32, d: u32) -> MonomialForm {
    let ctx = LocalRingCtx::new("S", &ResidueTower::rational(), ["x", "y"]).unwrap();
    MonomialForm { a, b: 0, gamma: RingElem::one(&ctx), f: RingElem::y(&ctx).pow(d), d }
}

#[test]
fn ostrowski_defects() {
    assert_eq!(defect_ostrowski(2, 1, 1, 2, true).unwrap(), Defect::Known(1));
    assert_eq!(defect_ostrowski(4, 2, 2, 0, true).unwrap(), Defect::Known(0));
    assert_eq!(defect_ostrowski(8, 1, 2, 2, true).unwrap(), Defect::Known(2));
    assert!(matches!(defect_ostrowski(6, 2, 2, 3, true), Err(ExtensionError::InconsistentRamification(_))));
    assert!(matches!(defect_ostrowski(6, 1, 1, 2, true), Err(ExtensionError::InconsistentRamification(_))));
    assert!(matches!(defect_ostrowski(4, 2, 1, 0, false).unwrap(), Defect::Undetermined(_)));
    let msg = defect_ostrowski(6, 2, 2, 3, true).unwrap_err().to_string();
    assert!(msg.starts_with("inconsistent ramification data"), "{msg}");
}

#[test]
fn local_degree_defects() {
    assert_eq!(defect_local_degree(&form(1, 2), 1, 1, 1, 2).unwrap(), 1);
    assert_eq!(defect_local_degree(&form(2, 1), 1, 2, 1, 0).unwrap(), 0);
    let err = defect_local_degree(&form(3, 1), 1, 2, 1, 2).unwrap_err();
    assert!(err.to_string().starts_with("inconsistent local degree"), "{err}");
    assert!(defect_local_degree(&form(2, 2), 1, 1, 1, 0).is_err());
}

#[test]
fn map_validation() {
    let r = LocalRingCtx::new("R", &ResidueTower::rational(), ["u", "v"]).unwrap();
    let s = LocalRingCtx::new("S", &ResidueTower::rational(), ["x", "y"]).unwrap();
    let unit = RingElem::parse(&s, "1 + x").unwrap();
    assert!(ExtensionMap::new(&r, [unit, RingElem::y(&s)], 1, 0).is_err());
    assert!(ExtensionMap::new(&r, [RingElem::x(&s), RingElem::y(&s)], 0, 0).is_err());
    assert!(ExtensionMap::new(&r, [RingElem::x(&s), RingElem::y(&s)], 1, 4).is_err());
    assert!(ExtensionMap::new(&r, [RingElem::x(&s), RingElem::y(&s)], 1, 2).is_err());
    let m = ExtensionMap::new(&r, [RingElem::x(&s), RingElem::y(&s).pow(2)], 2, 0).unwrap();
    assert_eq!(m.image(&RingElem::parse(&r, "u + v").unwrap()).unwrap().to_string(), RingElem::parse(&s, "x + y^2").unwrap().to_string());
    assert!(m.image(&RingElem::x(&s)).is_err());
}

#[test]
fn def2_ramification() {
    let fx = fixtures::def2();
    let rep = ramification_report(&fx.r, &fx.s, &fx.ext, 4).unwrap();
    assert_eq!((rep.e, rep.f), (1, 1));
    assert_eq!(rep.delta, Defect::Known(1));
    assert!(rep.routes_agree, "{rep}");
    assert_eq!(rep.degree_identity, Some(true));
    let by = |r: Route| rep.routes.iter().find(|x| x.route == r).unwrap().delta.clone();
    assert_eq!(by(Route::Ostrowski), Defect::Known(1));
    assert_eq!(by(Route::LocalDegree), Defect::Known(1));
    let csv = rep.csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("route,e,f,delta,consistent"));
    assert!(csv.contains("ostrowski,1,1,1,true"), "{csv}");
    assert!(csv.contains("local-degree,1,1,1,true"), "{csv}");
    assert!(csv.contains("alignment,1,1,,true"), "{csv}");
}

#[test]
fn pi2_ramification() {
    let fx = fixtures::pi2();
    let rep = ramification_report(&fx.r, &fx.s, &fx.ext, 4).unwrap();
    assert_eq!((rep.e, rep.f), (2, 1));
    let by = |r: Route| rep.routes.iter().find(|x| x.route == r).unwrap().delta.clone();
    assert!(matches!(by(Route::Ostrowski), Defect::Undetermined(_)));
    assert_eq!(by(Route::LocalDegree), Defect::Known(0));
    assert_eq!(rep.delta, Defect::Known(0));
    assert!(!rep.caveats.is_empty());
}

#[test]
fn identity_ramification() {
    let g = v1(true);
    let ext = ExtensionMap::identity(g.ctx());
    let rep = ramification_report(&g, &g, &ext, 2).unwrap();
    assert_eq!((rep.e, rep.f), (1, 1));
    assert_eq!(rep.delta, Defect::Known(0));
    assert!(rep.routes_agree);
    assert_eq!(rep.degree_identity, Some(true));
}

#[test]
fn splitting_pi2() {
    let fx = fixtures::pi2();
    let rep = splitting_report(&fx.candidates, &fx.ext, &fx.r, &SplitOptions::default()).unwrap();
    assert!(rep.candidates.iter().all(|c| c.restricts()), "{rep}");
    assert_eq!(rep.distinct(), 2, "{rep}");
    assert!(rep.splitting());
    assert!(rep.to_string().contains("witnessed"));
}

#[test]
fn splitting_disc() {
    let fx = fixtures::disc();
    let rep = splitting_report(&fx.candidates, &fx.ext, &fx.r, &SplitOptions { seed: 3, ..SplitOptions::default() }).unwrap();
    assert!(rep.candidates.iter().all(|c| c.restricts()), "{rep}");
    assert!(rep.splitting(), "{rep}");
}

#[test]
fn single_candidate_does_not_split() {
    let fx = fixtures::def2();
    let rep = splitting_report(&fx.candidates, &fx.ext, &fx.r, &SplitOptions::default()).unwrap();
    assert!(rep.candidates[0].restricts(), "{rep}");
    assert!(!rep.splitting());
    assert!(rep.to_string().contains("not witnessed"));
}

#[test]
fn candidate_on_wrong_ring_is_rejected() {
    let fx = fixtures::pi2();
    let other = fixtures::def2();
    let mut cands = fx.candidates.clone();
    cands.push(other.candidates[0].clone());
    let rep = splitting_report(&cands, &fx.ext, &fx.r, &SplitOptions::default()).unwrap();
    assert!(rep.candidates[2].rejection.is_some());
    assert_eq!(rep.distinct(), 2);
}

#[test]
fn splitting_is_reproducible() {
    let fx = fixtures::disc();
    let opts = SplitOptions { seed: 11, samples: 10, value_bound: None };
    let a = splitting_report(&fx.candidates, &fx.ext, &fx.r, &opts).unwrap().to_string();
    let b = splitting_report(&fx.candidates, &fx.ext, &fx.r, &opts).unwrap().to_string();
    assert_eq!(a, b);
}
