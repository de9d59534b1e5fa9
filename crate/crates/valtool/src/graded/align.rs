//! Level-by-level comparison of two generating sequences along an
//! extension of local rings.

use std::fmt;

use super::{frontier_levels, key_form, subalgebra_membership, transport, GradedError, Membership};
use crate::arith::{group_index, GroupIndex, Subfield, TowerElem, Value};
use crate::extension::ExtensionMap;
use crate::genseq::{form_ratio, initial_form, GenSeq, GradedElem};
use crate::ring::{LocalRingCtx, RingElem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObstructionKind {
    /// The last frontier key of S is not generated by the earlier ones
    /// over the graded ring of R.
    NewGeneratorRequired,
    ValueMismatch,
    IndexMismatch,
    /// The image of this key of R has a value different from its own.
    RestrictionMismatch(usize),
}

impl fmt::Display for ObstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObstructionKind::NewGeneratorRequired => f.write_str("new generator required"),
            ObstructionKind::ValueMismatch => f.write_str("value mismatch"),
            ObstructionKind::IndexMismatch => f.write_str("index mismatch"),
            ObstructionKind::RestrictionMismatch(j) => write!(f, "restriction mismatch at key {j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithFinGen(usize),
    ObstructionAt(usize, ObstructionKind),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConsistentWithFinGen(d) => write!(f, "consistent with finite generation to depth {d}"),
            Verdict::ObstructionAt(s, k) => write!(f, "obstruction at level {s}: {k}"),
        }
    }
}

/// `r_s`, `λ_s` and `χ_s` at one frontier level of S.
#[derive(Clone, Debug)]
pub struct LevelRecord {
    pub s: usize,
    pub tau: usize,
    pub gamma: Value,
    /// Largest `j` with every `in(P_{σ_0}), …, in(P_{σ_j})` in `A_{τ_s}`.
    pub r: Option<usize>,
    pub sigma: Option<usize>,
    pub lambda: GroupIndex,
    pub chi: usize,
}

#[derive(Clone, Debug)]
pub struct MatchedPair {
    pub s: usize,
    pub r: usize,
    pub sigma: usize,
    pub tau: usize,
    pub beta: Value,
    pub gamma: Value,
    pub nbar: (GroupIndex, GroupIndex),
    pub d: (Option<u32>, Option<u32>),
    pub n: (Option<u32>, Option<u32>),
}

impl MatchedPair {
    pub fn values_equal(&self) -> bool {
        self.beta == self.gamma
    }

    pub fn indices_equal(&self) -> bool {
        self.nbar.0 == self.nbar.1 && self.d.0 == self.d.1 && self.n.0 == self.n.1
    }
}

#[derive(Clone, Debug)]
pub struct AlignmentState {
    pub levels: Vec<LevelRecord>,
    pub matched: Vec<MatchedPair>,
    pub verdict: Verdict,
    /// Every frontier initial form of S lies in the image of the graded
    /// ring of R.
    pub gr_equal: bool,
    /// `λ_s` and `χ_s` never increase.
    pub monotone: bool,
    /// `(key name, β_j, value of the image of P_j)`.
    pub images: Vec<(String, Value, Value)>,
    /// Membership answer behind a new-generator obstruction.
    pub witness: Option<Membership>,
}

impl AlignmentState {
    /// Last `λ`, read as the ramification index.
    pub fn e(&self) -> Option<u64> {
        self.levels.last().and_then(|l| l.lambda.finite())
    }

    /// Last `χ`, read as the residue degree.
    pub fn f(&self) -> Option<usize> {
        self.levels.last().map(|l| l.chi)
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self.verdict, Verdict::ConsistentWithFinGen(_))
    }
}

impl fmt::Display for AlignmentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "alignment: {}", self.verdict)?;
        for (name, b, v) in &self.images {
            writeln!(f, "  image of {name}: value {v} (own {b})")?;
        }
        writeln!(f, "  s  tau  gamma     r  sigma  lambda  chi")?;
        for l in &self.levels {
            let o = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "  {:<2} {:<4} {:<9} {:<2} {:<6} {:<7} {}",
                l.s,
                l.tau,
                l.gamma.to_string(),
                o(l.r),
                o(l.sigma),
                l.lambda.to_string(),
                l.chi
            )?;
        }
        for m in &self.matched {
            writeln!(
                f,
                "  matched β_{} = {} with γ_{} = {}: values {}, indices {}",
                m.sigma,
                m.beta,
                m.tau,
                m.gamma,
                if m.values_equal() { "equal" } else { "differ" },
                if m.indices_equal() { "equal" } else { "differ" }
            )?;
        }
        writeln!(f, "  gr equality: {}, monotone: {}", if self.gr_equal { "yes" } else { "no" }, self.monotone)
    }
}

fn index_le(a: GroupIndex, b: GroupIndex) -> bool {
    match (a, b) {
        (GroupIndex::Finite(x), GroupIndex::Finite(y)) => x <= y,
        (_, GroupIndex::Infinite) => true,
        (GroupIndex::Infinite, GroupIndex::Finite(_)) => false,
    }
}

/// Residues of the keys of R computed inside S from their images.
fn residues_via_images(g_r: &GenSeq, g_s: &GenSeq, forms: &[GradedElem]) -> Result<Vec<Option<TowerElem>>, GradedError> {
    let mut out = vec![None];
    for i in 1..forms.len() {
        let (GroupIndex::Finite(nb), Some(u)) = (g_r.nbar(i), g_r.u_exps(i)) else {
            out.push(None);
            continue;
        };
        let num = forms[i].pow(nb as u32);
        let mut den = GradedElem::one(g_s.tower());
        for (k, &a) in u.iter().enumerate() {
            if a > 0 {
                den = den.mul(&forms[k].pow(a));
            }
        }
        let a = match form_ratio(g_s, &num, &den) {
            Ok(Some(a)) => Some(a),
            _ => g_r.alpha(i).map(|a| a.embed(g_s.tower())).transpose()?,
        };
        out.push(a);
    }
    Ok(out)
}

/// Polynomial of S whose monomials all have value at most a fixed bound,
/// with those values kept in increasing order.
struct Truncated {
    terms: Vec<((u32, u32), TowerElem, Value)>,
}

struct Truncator<'a> {
    g_s: &'a GenSeq,
    bound: Value,
}

impl Truncator<'_> {
    fn value(&self, i: u32, j: u32) -> Value {
        &self.g_s.beta(0).times(i as i64) + &self.g_s.beta(1).times(j as i64)
    }

    fn sorted(&self, map: std::collections::BTreeMap<(u32, u32), TowerElem>) -> Result<Truncated, GradedError> {
        let grp = self.g_s.group();
        let mut terms = Vec::new();
        for ((i, j), c) in map {
            if c.is_zero() {
                continue;
            }
            let v = self.value(i, j);
            if grp.le(&v, &self.bound)? {
                terms.push(((i, j), c, v));
            }
        }
        let mut err = None;
        terms.sort_by(|a, b| {
            grp.cmp(&a.2, &b.2).unwrap_or_else(|e| {
                err.get_or_insert(e);
                std::cmp::Ordering::Equal
            })
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(Truncated { terms }),
        }
    }

    fn from_elem(&self, f: &RingElem) -> Result<Truncated, GradedError> {
        self.sorted(f.terms().clone())
    }

    fn mul(&self, a: &Truncated, b: &Truncated) -> Result<Truncated, GradedError> {
        let grp = self.g_s.group();
        let mut out: std::collections::BTreeMap<(u32, u32), TowerElem> = std::collections::BTreeMap::new();
        for ((i1, j1), c1, v1) in &a.terms {
            let room = &self.bound - v1;
            for ((i2, j2), c2, v2) in &b.terms {
                if !grp.le(v2, &room)? {
                    break;
                }
                let c = c1 * c2;
                let key = (i1 + i2, j1 + j2);
                match out.get_mut(&key) {
                    Some(acc) => *acc = &*acc + &c,
                    None => {
                        out.insert(key, c);
                    }
                }
            }
        }
        self.sorted(out)
    }

    fn add(&self, a: &Truncated, b: &Truncated) -> Result<Truncated, GradedError> {
        let mut out: std::collections::BTreeMap<(u32, u32), TowerElem> = std::collections::BTreeMap::new();
        for (k, c, _) in a.terms.iter().chain(&b.terms) {
            match out.get_mut(k) {
                Some(acc) => *acc = &*acc + c,
                None => {
                    out.insert(*k, c.clone());
                }
            }
        }
        self.sorted(out)
    }

    fn pow(&self, f: &Truncated, mut e: u32) -> Result<Truncated, GradedError> {
        let one = TowerElem::one(self.g_s.tower());
        let mut acc = Truncated { terms: vec![((0, 0), one, Value::zero())] };
        let mut base = Truncated { terms: f.terms.clone() };
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    fn to_elem(&self, f: &Truncated) -> RingElem {
        RingElem::from_terms(self.g_s.ctx(), f.terms.iter().map(|(k, c, _)| (*k, c.clone())))
    }
}

/// Images of `P_0, …, P_last` built through the recursion of `g_r`, with
/// monomials of value above `β_last` dropped. Dropped parts have value
/// above every `β_j`, so initial forms are exact wherever the image has
/// its expected value, and a mismatch stays a mismatch otherwise.
fn key_images(g_r: &GenSeq, g_s: &GenSeq, ext: &ExtensionMap, last: usize) -> Result<Vec<RingElem>, GradedError> {
    let grp = g_s.group();
    let mut bound = g_r.beta(0).clone();
    for b in &g_r.betas()[..=last] {
        if grp.lt(&bound, b)? {
            bound = b.clone();
        }
    }
    let tr = Truncator { g_s, bound };
    let mut keys = vec![tr.from_elem(&ext.image(g_r.key(0))?)?];
    if last >= 1 {
        keys.push(tr.from_elem(&ext.image(g_r.key(1))?)?);
    }
    for i in 1..last {
        let step = &g_r.steps()[i - 1];
        let mut next = tr.pow(&keys[i], step.n)?;
        for t in &step.tail {
            let c = t.coeff.embed(g_s.tower())?;
            let mut m = Truncated { terms: vec![((0, 0), c, Value::zero())] };
            for (k, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    m = tr.mul(&m, &tr.pow(&keys[k], e)?)?;
                }
            }
            next = tr.add(&next, &m)?;
        }
        keys.push(next);
    }
    Ok(keys.iter().map(|k| tr.to_elem(k)).collect())
}

/// Compares the sequences of R and S along `ext` through `depth` frontier
/// levels of S.
pub fn fingen_detect(g_r: &GenSeq, g_s: &GenSeq, ext: &ExtensionMap, depth: usize) -> Result<AlignmentState, GradedError> {
    if !LocalRingCtx::same(ext.source(), g_r.ctx()) || !LocalRingCtx::same(ext.target(), g_s.ctx()) {
        return Err(GradedError::Precondition("extension map does not join the two sequences' rings".into()));
    }
    let ls = frontier_levels(g_s);
    let top_s = ls.len() - 1;
    let d = depth.min(top_s);
    let all_r = frontier_levels(g_r);
    // One frontier level of R beyond the depth compared on S.
    let last_r = all_r[(d + 1).min(all_r.len() - 1)].max((d + 1).min(g_r.top()));
    let lr: Vec<usize> = all_r.into_iter().filter(|&k| k <= last_r).collect();
    let names = g_r.key_names();
    let key_imgs = key_images(g_r, g_s, ext, last_r)?;
    let mut forms = Vec::new();
    let mut images = Vec::new();
    let mut mismatch = None;
    for (j, im) in key_imgs.iter().enumerate() {
        let f = initial_form(im, g_s)?;
        if &f.value != g_r.beta(j) && mismatch.is_none() {
            mismatch = Some(j);
        }
        images.push((names[j].clone(), g_r.beta(j).clone(), f.value.clone()));
        forms.push(f);
    }
    if let Some(j) = mismatch {
        return Ok(AlignmentState {
            levels: Vec::new(),
            matched: Vec::new(),
            verdict: Verdict::ObstructionAt(0, ObstructionKind::RestrictionMismatch(j)),
            gr_equal: false,
            monotone: true,
            images,
            witness: None,
        });
    }
    let t = g_s.tower();
    let k_s = g_s.ctx().residue().clone();
    let k_r = transport(g_r.ctx().residue(), t)?;
    let alpha_r = residues_via_images(g_r, g_s, &forms)?;
    let q: Vec<GradedElem> = ls[..=d].iter().map(|&k| key_form(g_s, k)).collect();

    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut r: Option<usize> = None;
    for s in 0..=d {
        // The algebras grow with s, so earlier members stay members.
        for (jj, &sig) in lr.iter().enumerate().skip(r.map_or(0, |x| x + 1)) {
            if subalgebra_membership(&forms[sig], &q[..=s], g_s, &k_s)?.member {
                r = Some(jj);
            } else {
                break;
            }
        }
        let sigma = r.map(|r| lr[r]);
        let big: Vec<Value> = ls[..=s].iter().map(|&k| g_s.beta(k).clone()).collect();
        let small: Vec<Value> = match r {
            Some(r) => lr[..=r].iter().map(|&k| g_r.beta(k).clone()).collect(),
            None => Vec::new(),
        };
        let lambda = group_index(&big, &small)?;
        let mut sub_r: Subfield = k_r.clone();
        for a in alpha_r.iter().take(sigma.map_or(0, |x| x + 1)).flatten() {
            sub_r = sub_r.with(a.clone());
        }
        let ds = g_s.residue_through(ls[s]).dimension(t)?;
        let dr = sub_r.dimension(t)?;
        if ds % dr != 0 {
            return Err(GradedError::Inconsistent(format!(
                "residue field of R (dimension {dr}) does not sit inside that of S (dimension {ds}) at level {s}"
            )));
        }
        levels.push(LevelRecord { s, tau: ls[s], gamma: g_s.beta(ls[s]).clone(), r, sigma, lambda, chi: ds / dr });
    }
    let monotone = levels
        .windows(2)
        .all(|w| index_le(w[1].lambda, w[0].lambda) && w[1].chi <= w[0].chi);

    let mut gr_equal = true;
    for x in &q {
        if !subalgebra_membership(x, &forms, g_s, &k_r)?.member {
            gr_equal = false;
            break;
        }
    }

    let mut matched = Vec::new();
    let mut witness = None;
    let verdict = if g_s.is_terminated() && depth >= top_s {
        Verdict::ConsistentWithFinGen(d)
    } else {
        let mut v = None;
        if d >= 1 {
            let mut gens: Vec<GradedElem> = q[..d].to_vec();
            gens.extend(forms.iter().cloned());
            let m = subalgebra_membership(&q[d], &gens, g_s, &k_s)?;
            if !m.member {
                v = Some(Verdict::ObstructionAt(d, ObstructionKind::NewGeneratorRequired));
            }
            witness = Some(m);
        }
        if v.is_none() {
            for s in 2..=d {
                let (a, b) = (&levels[s - 1], &levels[s]);
                let (Some(r), Some(sigma)) = (b.r, b.sigma) else { continue };
                if r < 2 || a.lambda != b.lambda || a.chi != b.chi {
                    continue;
                }
                let tau = b.tau;
                let m = MatchedPair {
                    s,
                    r,
                    sigma,
                    tau,
                    beta: g_r.beta(sigma).clone(),
                    gamma: g_s.beta(tau).clone(),
                    nbar: (g_r.nbar(sigma), g_s.nbar(tau)),
                    d: (g_r.d(sigma), g_s.d(tau)),
                    n: (g_r.n(sigma), g_s.n(tau)),
                };
                let kind = if !m.values_equal() {
                    Some(ObstructionKind::ValueMismatch)
                } else if !m.indices_equal() {
                    Some(ObstructionKind::IndexMismatch)
                } else {
                    None
                };
                matched.push(m);
                if let Some(k) = kind {
                    v = Some(Verdict::ObstructionAt(s, k));
                    break;
                }
            }
        }
        v.unwrap_or(Verdict::ConsistentWithFinGen(d))
    };
    Ok(AlignmentState { levels, matched, verdict, gr_equal, monotone, images, witness })
}
