//! Finite extensions of two-dimensional regular local rings: ramification
//! index, residue degree and defect, and comparison of candidate
//! extensions of a valuation.

mod split;

pub use split::{splitting_report, Candidate, CandidateKind, CandidateResult, SplitOptions, SplittingReport};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::ArithError;
use crate::genseq::{GenSeq, GenSeqError};
use crate::graded::{fingen_detect, transport, AlignmentState, GradedError};
use crate::ring::{monomialize_images, LocalRingCtx, MonomialCheck, MonomialForm, RingElem, RingError};

#[derive(Debug, Clone, Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    GenSeq(#[from] GenSeqError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid extension map: {0}")]
    Invalid(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent ramification data: {0}")]
    InconsistentRamification(String),
    #[error("inconsistent local degree: {0}")]
    InconsistentLocalDegree(String),
    #[error("candidate rejected: {0}")]
    Rejected(String),
}

/// `R → S` given by the images of the parameters of R, with the declared
/// degree of the field extension and the residue characteristic.
#[derive(Clone, Debug)]
pub struct ExtensionMap {
    source: Arc<LocalRingCtx>,
    target: Arc<LocalRingCtx>,
    images: [RingElem; 2],
    field_degree: u64,
    p: u64,
    unique: bool,
    local_level: Option<Box<ExtensionMap>>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl ExtensionMap {
    pub fn new(
        source: &Arc<LocalRingCtx>,
        images: [RingElem; 2],
        field_degree: u64,
        p: u64,
    ) -> Result<ExtensionMap, ExtensionError> {
        let target = images[0].ctx().clone();
        if !LocalRingCtx::same(&target, images[1].ctx()) {
            return Err(ExtensionError::Invalid("the two images live in different rings".into()));
        }
        for (k, im) in images.iter().enumerate() {
            if im.is_zero() || !im.in_max_ideal() {
                return Err(ExtensionError::Invalid(format!(
                    "image {im} of {} is not in the maximal ideal",
                    source.params()[k]
                )));
            }
        }
        if field_degree == 0 {
            return Err(ExtensionError::Invalid("field degree must be positive".into()));
        }
        if p != 0 && !is_prime(p) {
            return Err(ExtensionError::Invalid(format!("residue characteristic {p} is not prime")));
        }
        if p != target.tower().characteristic() {
            return Err(ExtensionError::Invalid(format!(
                "declared characteristic {p} differs from that of the residue field ({})",
                target.tower().characteristic()
            )));
        }
        Ok(ExtensionMap { source: source.clone(), target, images, field_degree, p, unique: false, local_level: None })
    }

    /// `x ↦ x`, `y ↦ y` on one ring.
    pub fn identity(ctx: &Arc<LocalRingCtx>) -> ExtensionMap {
        let p = ctx.tower().characteristic();
        ExtensionMap::new(ctx, [RingElem::x(ctx), RingElem::y(ctx)], 1, p)
            .expect("parameters are in the maximal ideal")
            .with_unique(true)
    }

    /// Declares that the valuation has a single extension.
    pub fn with_unique(mut self, unique: bool) -> ExtensionMap {
        self.unique = unique;
        self
    }

    /// Pair of rings further along the valuation at which the local-degree
    /// formula is applied.
    pub fn with_local_level(mut self, level: ExtensionMap) -> ExtensionMap {
        self.local_level = Some(Box::new(level));
        self
    }

    pub fn source(&self) -> &Arc<LocalRingCtx> {
        &self.source
    }

    pub fn target(&self) -> &Arc<LocalRingCtx> {
        &self.target
    }

    pub fn images(&self) -> &[RingElem; 2] {
        &self.images
    }

    pub fn field_degree(&self) -> u64 {
        self.field_degree
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn unique(&self) -> bool {
        self.unique
    }

    pub fn local_level(&self) -> Option<&ExtensionMap> {
        self.local_level.as_deref()
    }

    pub fn image(&self, f: &RingElem) -> Result<RingElem, RingError> {
        if !LocalRingCtx::same(f.ctx(), &self.source) {
            return Err(RingError::ContextMismatch(f.ctx().name().into(), self.source.name().into()));
        }
        Ok(f.substitute(&self.images))
    }

    pub fn monomialize_check(&self) -> Result<MonomialCheck, ExtensionError> {
        Ok(monomialize_images(&self.images)?)
    }

    /// `[S/m_S : R/m_R]` from the two residue subfields.
    pub fn residue_degree(&self) -> Result<usize, ExtensionError> {
        let t = self.target.tower();
        let ds = self.target.residue().dimension(t)?;
        let dr = transport(self.source.residue(), t)?.dimension(t)?;
        if ds % dr != 0 {
            return Err(ExtensionError::Invalid(format!(
                "residue field of {} does not embed in that of {}",
                self.source.name(),
                self.target.name()
            )));
        }
        Ok(ds / dr)
    }
}

/// A defect, or the reason it cannot be derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    Known(u32),
    Undetermined(String),
}

impl Defect {
    pub fn known(&self) -> Option<u32> {
        match self {
            Defect::Known(d) => Some(*d),
            Defect::Undetermined(_) => None,
        }
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::Known(d) => write!(f, "{d}"),
            Defect::Undetermined(why) => write!(f, "undetermined ({why})"),
        }
    }
}

/// `k` with `p^k = q`.
fn p_log(q: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    let mut x = q;
    while x > 1 {
        if p < 2 || !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        k += 1;
    }
    (x == 1).then_some(k)
}

/// Defect from `[K*:K] = e·f·p^δ` for a unique extension.
pub fn defect_ostrowski(field_deg: u64, e: u64, f: u64, p: u64, unique: bool) -> Result<Defect, ExtensionError> {
    if e == 0 || f == 0 || field_deg == 0 {
        return Err(ExtensionError::Precondition("degrees must be positive".into()));
    }
    if !unique {
        return Ok(Defect::Undetermined("the valuation is not declared to extend uniquely".into()));
    }
    let ef = e * f;
    if !field_deg.is_multiple_of(ef) {
        return Err(ExtensionError::InconsistentRamification(format!("{field_deg} is not divisible by e·f = {ef}")));
    }
    let q = field_deg / ef;
    if p == 0 {
        if q != 1 {
            return Err(ExtensionError::InconsistentRamification(format!(
                "characteristic 0 needs [K*:K] = e·f, got {field_deg} against {ef}"
            )));
        }
        return Ok(Defect::Known(0));
    }
    p_log(q, p)
        .map(Defect::Known)
        .ok_or_else(|| ExtensionError::InconsistentRamification(format!("{q} is not a power of {p}")))
}

fn local_degree(a: u64, d: u64, res_deg: u64, e: u64, f: u64, p: u64) -> Result<u32, ExtensionError> {
    if e == 0 || f == 0 || res_deg == 0 || a == 0 || d == 0 {
        return Err(ExtensionError::Precondition("degrees must be positive".into()));
    }
    let lhs = a * d * res_deg;
    let ef = e * f;
    if !lhs.is_multiple_of(ef) {
        return Err(ExtensionError::InconsistentLocalDegree(format!("a·d·[S/m:R/m] = {lhs} is not divisible by e·f = {ef}")));
    }
    let q = lhs / ef;
    if p == 0 {
        return match q {
            1 => Ok(0),
            _ => Err(ExtensionError::InconsistentLocalDegree(format!(
                "characteristic 0 needs a·d·[S/m:R/m] = e·f, got {lhs} against {ef}"
            ))),
        };
    }
    p_log(q, p).ok_or_else(|| ExtensionError::InconsistentLocalDegree(format!("{q} is not a power of {p}")))
}

/// Defect from `a·d·[S₁/m:R₁/m] = e·f·p^δ` for a monomial map.
pub fn defect_local_degree(mf: &MonomialForm, res_deg: u64, e: u64, f: u64, p: u64) -> Result<u32, ExtensionError> {
    local_degree(mf.a as u64, mf.d as u64, res_deg, e, f, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Ostrowski,
    LocalDegree,
    Alignment,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Ostrowski => "ostrowski",
            Route::LocalDegree => "local-degree",
            Route::Alignment => "alignment",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RouteResult {
    pub route: Route,
    pub delta: Defect,
    /// The route ran without contradicting its own identity.
    pub consistent: bool,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct RamificationReport {
    pub e: u64,
    pub f: u64,
    pub delta: Defect,
    /// Route that supplied `delta`.
    pub route: Route,
    pub routes: Vec<RouteResult>,
    /// Every route that produced a defect produced the same one.
    pub routes_agree: bool,
    pub field_degree: u64,
    pub p: u64,
    /// `λ·χ·p^δ = [K*:K]` when `δ` is known and the extension is unique.
    pub degree_identity: Option<bool>,
    pub caveats: Vec<String>,
    pub alignment: AlignmentState,
}

impl RamificationReport {
    pub const CSV_HEADER: &'static str = "route,e,f,delta,consistent";

    pub fn csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.routes {
            let d = r.delta.known().map(|d| d.to_string()).unwrap_or_default();
            s.push_str(&format!("{},{},{},{},{}\n", r.route, self.e, self.f, d, r.consistent));
        }
        s
    }
}

impl fmt::Display for RamificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ramification: e = {}, f = {}, δ = {} (via {})", self.e, self.f, self.delta, self.route)?;
        writeln!(f, "  [K*:K] = {}, p = {}", self.field_degree, self.p)?;
        for r in &self.routes {
            writeln!(
                f,
                "  {:<12} δ = {:<40} {}  {}",
                r.route.to_string(),
                r.delta.to_string(),
                if r.consistent { "ok" } else { "INCONSISTENT" },
                r.note
            )?;
        }
        writeln!(f, "  routes agree: {}", if self.routes_agree { "yes" } else { "NO" })?;
        if let Some(ok) = self.degree_identity {
            writeln!(f, "  λ·χ·p^δ = [K*:K]: {}", if ok { "holds" } else { "FAILS" })?;
        }
        for c in &self.caveats {
            writeln!(f, "  caveat: {c}")?;
        }
        Ok(())
    }
}

pub fn ramification_report(
    g_r: &GenSeq,
    g_s: &GenSeq,
    ext: &ExtensionMap,
    depth: usize,
) -> Result<RamificationReport, ExtensionError> {
    let alignment = fingen_detect(g_r, g_s, ext, depth)?;
    let e = alignment
        .e()
        .ok_or_else(|| ExtensionError::Precondition("the value groups have an infinite index at the last level".into()))?;
    let f = alignment.f().ok_or_else(|| ExtensionError::Precondition("no aligned level".into()))? as u64;
    let p = ext.characteristic();
    let mut routes = vec![RouteResult {
        route: Route::Alignment,
        delta: Defect::Undetermined("supplies e and f only".into()),
        consistent: alignment.monotone,
        note: alignment.verdict.to_string(),
    }];
    let mut caveats = Vec::new();
    if !alignment.monotone {
        caveats.push("λ or χ increased between levels".into());
    }

    routes.push(match defect_ostrowski(ext.field_degree(), e, f, p, ext.unique()) {
        Ok(d) => RouteResult { route: Route::Ostrowski, delta: d, consistent: true, note: String::new() },
        Err(err) => RouteResult {
            route: Route::Ostrowski,
            delta: Defect::Undetermined("inconsistent".into()),
            consistent: false,
            note: err.to_string(),
        },
    });

    let level = ext.local_level().unwrap_or(ext);
    let user_level = ext.local_level().is_some();
    let route = match level.monomialize_check()? {
        MonomialCheck::NotMonomial(why) => RouteResult {
            route: Route::LocalDegree,
            delta: Defect::Undetermined(format!("not monomial: {why}")),
            consistent: true,
            note: String::new(),
        },
        MonomialCheck::Monomial(mf) => {
            let rd = level.residue_degree()? as u64;
            let note = format!("a = {}, d = {}, residue degree {rd}", mf.a, mf.d);
            match defect_local_degree(&mf, rd, e, f, p) {
                Ok(d) => RouteResult { route: Route::LocalDegree, delta: Defect::Known(d), consistent: true, note },
                Err(err) => RouteResult {
                    route: Route::LocalDegree,
                    delta: Defect::Undetermined("inconsistent".into()),
                    consistent: false,
                    note: format!("{note}; {err}"),
                },
            }
        }
    };
    if matches!(route.delta, Defect::Known(_)) || !route.consistent {
        caveats.push(format!(
            "local-degree formula applied at {} level; a level further along the valuation may be needed",
            if user_level { "the user-selected" } else { "the given" }
        ));
    }
    routes.push(route);

    let known: Vec<(Route, u32)> = routes.iter().filter_map(|r| r.delta.known().map(|d| (r.route, d))).collect();
    let routes_agree = known.windows(2).all(|w| w[0].1 == w[1].1);
    let (route, delta) = match known.first() {
        Some(&(r, d)) => (r, Defect::Known(d)),
        None => (Route::Alignment, Defect::Undetermined("no route applies".into())),
    };
    let degree_identity = match (&delta, ext.unique()) {
        (Defect::Known(d), true) => Some(e * f * (if p == 0 { 1 } else { p.pow(*d) }) == ext.field_degree()),
        _ => None,
    };
    if p == 0 && delta.known().is_some_and(|d| d != 0) {
        return Err(ExtensionError::InconsistentRamification("characteristic 0 with a positive defect".into()));
    }
    Ok(RamificationReport {
        e,
        f,
        delta,
        route,
        routes,
        routes_agree,
        field_degree: ext.field_degree(),
        p,
        degree_identity,
        caveats,
        alignment,
    })
}

#[cfg(test)]
mod tests;
