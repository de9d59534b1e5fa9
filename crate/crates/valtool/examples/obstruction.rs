//! A sequence whose value group is not finitely generated: across one free
//! transform every level asks for a new generator.

use std::time::Instant;

use valtool::blowup::free_transform;
use valtool::extension::ExtensionMap;
use valtool::fixtures;
use valtool::graded::fingen_detect;
use valtool::ring::RingElem;

fn main() {
    let g = fixtures::cor_n32(9);
    let (m, h) = free_transform(&g).unwrap();
    let imgs = [RingElem::x(g.ctx()), RingElem::y(g.ctx())].map(|v| m.to_target(&m.pull_to_chart(&v).unwrap()));
    let ext = ExtensionMap::new(g.ctx(), imgs, 1, 0).unwrap();
    for d in 1..=6 {
        let t = Instant::now();
        let st = fingen_detect(&g, &h, &ext, d).unwrap();
        let w = st.witness.as_ref().map(|w| w.member);
        println!("depth {d}: {}  member {w:?}  [{:?}]", st.verdict, t.elapsed());
    }
}
