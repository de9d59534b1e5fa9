//! Scenario files: declarations of fields, rings, valuations, embeddings
//! and extensions, followed by a list of commands.
//!
//! ```text
//! [field]
//! base = Q
//! adjoin i = i^2 + 1
//! irrational pi = pi
//!
//! [ring R]
//! params = x, y
//!
//! [embedding curve]
//! ring = R
//! x = t^2
//! y = t^3 + t^4 + O(t^40)
//! unit = x 1
//!
//! [valuation nu]
//! ring = R
//! beta = 1, 3/2
//! key P2 = y^2 - x^3 value 7/2
//! oracle = curve
//!
//! [run]
//! validate
//! eval y^2 + x^3
//! ```

mod run;

pub use run::{run_scenario, Format, Output, Report, RunOptions, Section};

use std::sync::Arc;

use num::Zero;

use crate::arith::{IrrationalDescriptor, Rat, ResidueTower, Subfield, TowerElem, Value, ValueGroup};
use crate::extension::ExtensionMap;
use crate::genseq::{GenSeq, GenSeqSpec, KeyStep, TailTerm};
use crate::ring::{parse_formal, parse_rational, LocalRingCtx, ParseError, RingElem, SeriesEmbedding, TruncSeries};

#[derive(Clone, Debug)]
pub struct ExtensionDecl {
    pub map: ExtensionMap,
    /// Valuation of the source ring.
    pub below: Option<String>,
    /// Valuation of the target ring used for alignment.
    pub above: Option<String>,
    /// Valuations or embeddings of the target compared by `split`.
    pub candidates: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum CommandKind {
    Validate,
    Eval(RingElem),
    Expand(RingElem),
    Blowup(usize),
    Graded(Option<usize>),
    Fingen(Option<usize>),
    Ramify(Option<usize>),
    Split,
    Integral(RingElem),
}

#[derive(Clone, Debug)]
pub struct Command {
    pub line: usize,
    /// Source text of the command.
    pub text: String,
    /// Valuation or extension the command acts on.
    pub target: String,
    pub kind: CommandKind,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub tower: Arc<ResidueTower>,
    pub group: ValueGroup,
    pub rings: Vec<(String, Arc<LocalRingCtx>)>,
    pub embeddings: Vec<(String, SeriesEmbedding)>,
    pub valuations: Vec<(String, GenSeq)>,
    pub extensions: Vec<(String, ExtensionDecl)>,
    pub commands: Vec<Command>,
}

fn lookup<'a, T>(items: &'a [(String, T)], name: &str) -> Option<&'a T> {
    items.iter().find(|(n, _)| n == name).map(|(_, v)| v)
}

impl Scenario {
    pub fn ring(&self, name: &str) -> Option<&Arc<LocalRingCtx>> {
        lookup(&self.rings, name)
    }

    pub fn valuation(&self, name: &str) -> Option<&GenSeq> {
        lookup(&self.valuations, name)
    }

    pub fn embedding(&self, name: &str) -> Option<&SeriesEmbedding> {
        lookup(&self.embeddings, name)
    }

    pub fn extension(&self, name: &str) -> Option<&ExtensionDecl> {
        lookup(&self.extensions, name)
    }

    /// Parses `text` as a value of this scenario's group.
    pub fn parse_value(&self, text: &str) -> Result<Value, ParseError> {
        parse_value(text, &self.group)
    }
}

/// One significant line, with the 1-based column where `text` starts.
#[derive(Clone, Copy)]
struct Line<'a> {
    no: usize,
    col: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, token: &str, msg: impl Into<String>) -> ParseError {
        let col = self.text.find(token).map_or(self.col, |k| self.col + self.text[..k].chars().count());
        ParseError { line: self.no, col, token: token.to_string(), message: msg.into() }
    }

    /// Splits `key = value`, with the column of the value.
    fn assignment(&self) -> Option<(&'a str, Line<'a>)> {
        let k = self.text.find('=')?;
        let key = self.text[..k].trim();
        let rest = &self.text[k + 1..];
        let lead = rest.len() - rest.trim_start().len();
        let col = self.col + self.text[..k + 1 + lead].chars().count();
        Some((key, Line { no: self.no, col, text: rest.trim() }))
    }

    /// The part after the first word, with its column.
    fn after_word(&self) -> (&'a str, Line<'a>) {
        let t = self.text;
        let k = t.find(char::is_whitespace).unwrap_or(t.len());
        let rest = &t[k..];
        let lead = rest.len() - rest.trim_start().len();
        (&t[..k], Line { no: self.no, col: self.col + t[..k + lead].chars().count(), text: rest.trim() })
    }

    fn sub(&self, start: usize, end: usize) -> Line<'a> {
        let piece = &self.text[start..end];
        let lead = piece.len() - piece.trim_start().len();
        Line { no: self.no, col: self.col + self.text[..start + lead].chars().count(), text: piece.trim() }
    }
}

fn value_symbols(group: &ValueGroup) -> Vec<&str> {
    group.irrational().map(|d| vec![d.name()]).unwrap_or_default()
}

/// `7/2`, `2 + pi`, `3/2*pi` or the pair `(q0, q1)`.
pub fn parse_value(text: &str, group: &ValueGroup) -> Result<Value, ParseError> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() == 2 {
            let q0 = parse_rational(parts[0]).ok_or_else(|| ParseError::new(2, parts[0].trim(), "expected a rational"))?;
            let q1 = parse_rational(parts[1]).ok_or_else(|| ParseError::new(2, parts[1].trim(), "expected a rational"))?;
            if !q1.is_zero() && group.irrational().is_none() {
                return Err(ParseError::new(1, t, "no irrational constant declared"));
            }
            return Ok(Value::new(q0, q1));
        }
    }
    let q = ResidueTower::rational();
    let syms = value_symbols(group);
    let p = parse_formal(t, &syms, &q)?;
    let mut q0 = Rat::zero();
    let mut q1 = Rat::zero();
    for (e, c) in p.terms() {
        let c = c.as_base().cloned().ok_or_else(|| ParseError::new(1, t, "value coefficients must be rational"))?;
        match e.first().copied().unwrap_or(0) {
            0 => q0 = c,
            1 => q1 = c,
            _ => return Err(ParseError::new(1, t, "values are linear in the irrational constant")),
        }
    }
    Ok(Value::new(q0, q1))
}

fn yes_no(line: &Line) -> Result<bool, ParseError> {
    match line.text {
        "yes" | "true" => Ok(true),
        "no" | "false" => Ok(false),
        other => Err(line.err(other, "expected yes or no")),
    }
}

fn number<T: std::str::FromStr>(line: &Line, what: &str) -> Result<T, ParseError> {
    line.text.parse().map_err(|_| line.err(line.text, format!("expected {what}")))
}

fn expr_err(e: ParseError, line: &Line) -> ParseError {
    e.at(line.no, line.col - 1)
}

struct Builder {
    tower: Arc<ResidueTower>,
    irrational: Option<IrrationalDescriptor>,
    field_done: bool,
    sc: Option<Scenario>,
}

#[derive(Default)]
struct Block<'a> {
    kind: &'a str,
    name: Option<&'a str>,
    header: Option<Line<'a>>,
    lines: Vec<Line<'a>>,
}

/// Parses and builds a scenario. Every error carries a line, a column and
/// the offending token.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut sections: Vec<Block> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = content.len() - content.trim_start().len() + 1;
        let line = Line { no: k + 1, col, text: trimmed };
        if let Some(head) = trimmed.strip_prefix('[') {
            let head = head.strip_suffix(']').ok_or_else(|| line.err(trimmed, "unterminated section header"))?;
            let mut words = head.split_whitespace();
            let kind = words.next().ok_or_else(|| line.err(trimmed, "empty section header"))?;
            let name = words.next();
            if let Some(extra) = words.next() {
                return Err(line.err(extra, "unexpected word in section header"));
            }
            sections.push(Block { kind, name, header: Some(line), lines: Vec::new() });
        } else {
            match sections.last_mut() {
                Some(s) => s.lines.push(line),
                None => return Err(line.err(trimmed, "content before the first section")),
            }
        }
    }
    let mut b = Builder { tower: ResidueTower::rational(), irrational: None, field_done: false, sc: None };
    for s in &sections {
        let header = s.header.expect("section header");
        let named = |what: &str| -> Result<&str, ParseError> {
            s.name.ok_or_else(|| header.err(header.text, format!("{what} sections need a name")))
        };
        match s.kind {
            "field" => b.field(s)?,
            "ring" => {
                let name = named("ring")?;
                b.ring(name, s)?
            }
            "embedding" => {
                let name = named("embedding")?;
                b.embedding(name, s)?
            }
            "valuation" => {
                let name = named("valuation")?;
                b.valuation(name, s)?
            }
            "extension" => {
                let name = named("extension")?;
                b.extension(name, s)?
            }
            "run" => b.run(s)?,
            other => return Err(header.err(other, "unknown section")),
        }
    }
    Ok(b.finish())
}

impl Builder {
    fn scenario(&mut self) -> &mut Scenario {
        if self.sc.is_none() {
            self.field_done = true;
            let group = match &self.irrational {
                Some(d) => ValueGroup::with_irrational(d.clone()),
                None => ValueGroup::rational(),
            };
            self.sc = Some(Scenario {
                tower: self.tower.clone(),
                group,
                rings: Vec::new(),
                embeddings: Vec::new(),
                valuations: Vec::new(),
                extensions: Vec::new(),
                commands: Vec::new(),
            });
        }
        self.sc.as_mut().expect("scenario")
    }

    fn finish(mut self) -> Scenario {
        self.scenario();
        self.sc.expect("scenario")
    }

    fn check_fresh(&mut self, name: &str, header: &Line) -> Result<(), ParseError> {
        let sc = self.scenario();
        let taken = sc.rings.iter().any(|r| r.0 == name)
            || sc.embeddings.iter().any(|r| r.0 == name)
            || sc.valuations.iter().any(|r| r.0 == name)
            || sc.extensions.iter().any(|r| r.0 == name);
        if taken {
            return Err(header.err(name, format!("duplicate name {name}")));
        }
        Ok(())
    }

    fn field(&mut self, s: &Block) -> Result<(), ParseError> {
        let header = s.header.expect("header");
        if self.field_done {
            return Err(header.err("field", "the field section must come first and only once"));
        }
        self.field_done = true;
        for line in &s.lines {
            let (word, rest) = line.after_word();
            match word {
                "base" => {
                    let (_, v) = line.assignment().ok_or_else(|| line.err(word, "expected base = Q or base = F<p>"))?;
                    if self.tower.num_levels() > 0 {
                        return Err(line.err(word, "base must be set before adjoining"));
                    }
                    self.tower = match v.text {
                        "Q" | "QQ" => ResidueTower::rational(),
                        t => {
                            let p = t.strip_prefix("GF").or_else(|| t.strip_prefix('F')).map(|p| p.trim_matches(|c| c == '(' || c == ')' || c == ' '));
                            let p: u64 = p.and_then(|p| p.parse().ok()).ok_or_else(|| v.err(t, "expected Q or F<p>"))?;
                            ResidueTower::prime(p).map_err(|e| v.err(t, e.to_string()))?
                        }
                    };
                }
                "adjoin" => {
                    let (name, poly) = rest.assignment().ok_or_else(|| rest.err(rest.text, "expected adjoin NAME = POLY"))?;
                    let p = parse_formal(poly.text, &[name], &self.tower).map_err(|e| expr_err(e, &poly))?;
                    let deg = p.terms().keys().map(|e| e[0]).max().unwrap_or(0) as usize;
                    let mut coeffs = vec![TowerElem::zero(&self.tower); deg + 1];
                    for (e, c) in p.terms() {
                        coeffs[e[0] as usize] = c.clone();
                    }
                    self.tower = self.tower.extend(name, &coeffs).map_err(|e| poly.err(poly.text, e.to_string()))?;
                }
                "irrational" => {
                    if self.irrational.is_some() {
                        return Err(line.err(word, "only one irrational constant is supported"));
                    }
                    self.irrational = Some(irrational(&rest)?);
                }
                other => return Err(line.err(other, "unknown field entry")),
            }
        }
        Ok(())
    }

    fn ring(&mut self, name: &str, s: &Block) -> Result<(), ParseError> {
        let header = s.header.expect("header");
        self.check_fresh(name, &header)?;
        let tower = self.tower.clone();
        let mut params: Option<[String; 2]> = None;
        let mut residue = Subfield::prefix(tower.num_levels());
        for line in &s.lines {
            let (key, v) = line.assignment().ok_or_else(|| line.err(line.text, "expected key = value"))?;
            match key {
                "params" => {
                    let ps: Vec<&str> = v.text.split(',').map(str::trim).collect();
                    if ps.len() != 2 || ps.iter().any(|p| p.is_empty()) {
                        return Err(v.err(v.text, "expected two parameter names"));
                    }
                    params = Some([ps[0].to_string(), ps[1].to_string()]);
                }
                "residue" => {
                    residue = match v.text {
                        "all" => Subfield::prefix(tower.num_levels()),
                        "base" => Subfield::prefix(0),
                        g => Subfield::prefix(tower.level_index(g).ok_or_else(|| v.err(g, "unknown tower generator"))? + 1),
                    }
                }
                other => return Err(line.err(other, "unknown ring entry")),
            }
        }
        let params = params.ok_or_else(|| header.err(name, "ring needs params = a, b"))?;
        let ctx = LocalRingCtx::with_residue(name, &tower, residue, [&params[0], &params[1]], Vec::new())
            .map_err(|e| header.err(name, e.to_string()))?;
        self.scenario().rings.push((name.to_string(), ctx));
        Ok(())
    }

    fn ring_ref(&mut self, v: &Line) -> Result<Arc<LocalRingCtx>, ParseError> {
        self.scenario().ring(v.text).cloned().ok_or_else(|| v.err(v.text, format!("undeclared ring {}", v.text)))
    }

    fn embedding(&mut self, name: &str, s: &Block) -> Result<(), ParseError> {
        let header = s.header.expect("header");
        self.check_fresh(name, &header)?;
        let mut ctx = None;
        let mut ram = 1u32;
        let mut images: [Option<TruncSeries>; 2] = [None, None];
        let mut unit: Option<(usize, Rat)> = None;
        for line in &s.lines {
            let (key, v) = line.assignment().ok_or_else(|| line.err(line.text, "expected key = value"))?;
            match key {
                "ring" => ctx = Some(self.ring_ref(&v)?),
                "ramification" => ram = number(&v, "a positive integer")?,
                "unit" => {
                    let c = ctx.as_ref().ok_or_else(|| line.err(key, "ring must be given first"))?;
                    let (p, val) = v.after_word();
                    let k = c.params().iter().position(|x| *x == p).ok_or_else(|| v.err(p, "unknown parameter"))?;
                    let q = parse_rational(val.text).ok_or_else(|| val.err(val.text, "expected a rational value"))?;
                    unit = Some((k, q));
                }
                p => {
                    let c = ctx.as_ref().ok_or_else(|| line.err(key, "ring must be given first"))?;
                    let k = c.params().iter().position(|x| *x == p).ok_or_else(|| line.err(p, "unknown embedding entry"))?;
                    images[k] = Some(series(&v, c.tower())?);
                }
            }
        }
        let ctx = ctx.ok_or_else(|| header.err(name, "embedding needs ring = NAME"))?;
        let [Some(x), Some(y)] = images else {
            return Err(header.err(name, "embedding needs images of both parameters"));
        };
        let unit = unit.unwrap_or((0, Rat::from_integer(1.into())));
        let emb = SeriesEmbedding::new(&ctx, ram, [x, y], unit).map_err(|e| header.err(name, e.to_string()))?;
        self.scenario().embeddings.push((name.to_string(), emb));
        Ok(())
    }

    fn valuation(&mut self, name: &str, s: &Block) -> Result<(), ParseError> {
        let header = s.header.expect("header");
        self.check_fresh(name, &header)?;
        let group = self.scenario().group.clone();
        let mut ctx: Option<Arc<LocalRingCtx>> = None;
        let mut betas: Option<(Value, Value)> = None;
        let mut names: Vec<String> = Vec::new();
        let mut steps: Vec<KeyStep> = Vec::new();
        let mut top_alpha = None;
        let mut terminated = false;
        let mut oracle = None;
        for line in &s.lines {
            let (word, rest) = line.after_word();
            if word == "key" {
                let c = ctx.as_ref().ok_or_else(|| line.err(word, "ring must be given first"))?;
                if betas.is_none() {
                    return Err(line.err(word, "beta must be given before the keys"));
                }
                let (kname, def) = rest.assignment().ok_or_else(|| rest.err(rest.text, "expected key NAME = EXPR value V"))?;
                if names.iter().any(|n| n == kname) {
                    return Err(rest.err(kname, format!("duplicate key name {kname}")));
                }
                steps.push(key_step(&def, &names, c.tower(), &group)?);
                names.push(kname.to_string());
                continue;
            }
            let (key, v) = line.assignment().ok_or_else(|| line.err(line.text, "expected key = value"))?;
            match key {
                "ring" => {
                    let c = self.ring_ref(&v)?;
                    names = c.params().iter().map(|p| p.to_string()).collect();
                    ctx = Some(c);
                }
                "beta" => {
                    let parts: Vec<&str> = split_top(v.text);
                    if parts.len() != 2 {
                        return Err(v.err(v.text, "expected beta = b0, b1"));
                    }
                    let b0 = parse_value(parts[0], &group).map_err(|e| v.err(parts[0].trim(), e.message))?;
                    let b1 = parse_value(parts[1], &group).map_err(|e| v.err(parts[1].trim(), e.message))?;
                    betas = Some((b0, b1));
                }
                "top alpha" => {
                    let c = ctx.as_ref().ok_or_else(|| line.err(key, "ring must be given first"))?;
                    top_alpha = Some(constant(&v, c.tower())?);
                }
                "terminated" => terminated = yes_no(&v)?,
                "oracle" => {
                    let e = self.scenario().embedding(v.text).cloned();
                    oracle = Some(e.ok_or_else(|| v.err(v.text, format!("undeclared embedding {}", v.text)))?);
                }
                other => return Err(line.err(other, "unknown valuation entry")),
            }
        }
        let ctx = ctx.ok_or_else(|| header.err(name, "valuation needs ring = NAME"))?;
        let (beta0, beta1) = betas.ok_or_else(|| header.err(name, "valuation needs beta = b0, b1"))?;
        let spec = GenSeqSpec { beta0, beta1, steps, top_alpha, terminated };
        let mut g = GenSeq::new(&ctx, &group, spec).map_err(|e| header.err(name, e.to_string()))?;
        if let Some(o) = oracle {
            if !LocalRingCtx::same(o.ctx(), &ctx) {
                return Err(header.err(name, "oracle embedding lives on a different ring"));
            }
            g = g.with_oracle(Arc::new(o)).map_err(|e| header.err(name, e.to_string()))?;
        }
        self.scenario().valuations.push((name.to_string(), g));
        Ok(())
    }

    fn extension(&mut self, name: &str, s: &Block) -> Result<(), ParseError> {
        let header = s.header.expect("header");
        self.check_fresh(name, &header)?;
        let mut source: Option<Arc<LocalRingCtx>> = None;
        let mut target: Option<Arc<LocalRingCtx>> = None;
        let mut images: [Option<RingElem>; 2] = [None, None];
        let mut degree: Option<u64> = None;
        let mut p: Option<u64> = None;
        let mut unique = false;
        let mut level: Option<ExtensionMap> = None;
        let mut below = None;
        let mut above = None;
        let mut candidates = Vec::new();
        for line in &s.lines {
            let (key, v) = line.assignment().ok_or_else(|| line.err(line.text, "expected key = value"))?;
            match key {
                "source" => source = Some(self.ring_ref(&v)?),
                "target" => target = Some(self.ring_ref(&v)?),
                "degree" => degree = Some(number(&v, "a positive integer")?),
                "p" => p = Some(number(&v, "a prime or 0")?),
                "unique" => unique = yes_no(&v)?,
                "level" => {
                    let e = self.scenario().extension(v.text).map(|d| d.map.clone());
                    level = Some(e.ok_or_else(|| v.err(v.text, format!("undeclared extension {}", v.text)))?);
                }
                "below" | "above" => {
                    if self.scenario().valuation(v.text).is_none() {
                        return Err(v.err(v.text, format!("undeclared valuation {}", v.text)));
                    }
                    if key == "below" {
                        below = Some(v.text.to_string());
                    } else {
                        above = Some(v.text.to_string());
                    }
                }
                "candidates" => {
                    for c in v.text.split(',').map(str::trim) {
                        let sc = self.scenario();
                        if sc.valuation(c).is_none() && sc.embedding(c).is_none() {
                            return Err(v.err(c, format!("undeclared valuation or embedding {c}")));
                        }
                        candidates.push(c.to_string());
                    }
                }
                param => {
                    let src = source.as_ref().ok_or_else(|| line.err(key, "source must be given first"))?;
                    let tgt = target.as_ref().ok_or_else(|| line.err(key, "target must be given first"))?;
                    let k = src.params().iter().position(|x| *x == param).ok_or_else(|| line.err(param, "unknown extension entry"))?;
                    images[k] = Some(ring_elem(&v, tgt)?);
                }
            }
        }
        let source = source.ok_or_else(|| header.err(name, "extension needs source = RING"))?;
        let target = target.ok_or_else(|| header.err(name, "extension needs target = RING"))?;
        let [Some(a), Some(b)] = images else {
            return Err(header.err(name, "extension needs images of both source parameters"));
        };
        let p = p.unwrap_or(target.tower().characteristic());
        let mut map = ExtensionMap::new(&source, [a, b], degree.unwrap_or(1), p)
            .map_err(|e| header.err(name, e.to_string()))?
            .with_unique(unique);
        if let Some(l) = level {
            map = map.with_local_level(l);
        }
        for (role, v) in [("below", &below), ("above", &above)] {
            if let Some(v) = v {
                let g = self.scenario().valuation(v).expect("declared");
                let ring = if role == "below" { &source } else { &target };
                if !LocalRingCtx::same(g.ctx(), ring) {
                    return Err(header.err(name, format!("valuation {v} does not live on {}", ring.name())));
                }
            }
        }
        self.scenario().extensions.push((name.to_string(), ExtensionDecl { map, below, above, candidates }));
        Ok(())
    }

    fn run(&mut self, s: &Block) -> Result<(), ParseError> {
        for line in &s.lines {
            let cmd = self.command(line)?;
            self.scenario().commands.push(cmd);
        }
        Ok(())
    }

    fn command(&mut self, line: &Line) -> Result<Command, ParseError> {
        // A trailing `on NAME` picks the valuation or extension.
        let (body, named) = match line.text.rfind(" on ") {
            Some(k) => (line.sub(0, k), Some(line.sub(k + 4, line.text.len()))),
            None => (*line, None),
        };
        let (word, rest) = body.after_word();
        let sc = self.scenario();
        let on_extension = matches!(word, "fingen" | "ramify" | "split" | "integral");
        let target = match &named {
            Some(n) => {
                let ok = if on_extension { sc.extension(n.text).is_some() } else { sc.valuation(n.text).is_some() };
                if !ok {
                    let what = if on_extension { "extension" } else { "valuation" };
                    return Err(n.err(n.text, format!("undeclared {what} {}", n.text)));
                }
                n.text.to_string()
            }
            None => {
                // Extension commands default to the first extension that
                // carries valuations on both sides.
                let first = if on_extension {
                    let full = sc.extensions.iter().find(|e| e.1.below.is_some() && e.1.above.is_some());
                    full.or(sc.extensions.first()).map(|e| e.0.clone())
                } else {
                    sc.valuations.first().map(|e| e.0.clone())
                };
                first.ok_or_else(|| {
                    line.err(word, format!("no {} declared", if on_extension { "extension" } else { "valuation" }))
                })?
            }
        };
        let depth = |rest: &Line| -> Result<Option<usize>, ParseError> {
            match rest.text {
                "" => Ok(None),
                t => Ok(Some(number(rest, "a depth").map_err(|_| rest.err(t, "expected a depth"))?)),
            }
        };
        let kind = match word {
            "validate" => CommandKind::Validate,
            "eval" | "expand" => {
                let g = sc.valuation(&target).expect("declared");
                let f = ring_elem(&rest, g.ctx())?;
                if word == "eval" {
                    CommandKind::Eval(f)
                } else {
                    CommandKind::Expand(f)
                }
            }
            "blowup" => CommandKind::Blowup(depth(&rest)?.unwrap_or(1)),
            "graded" => CommandKind::Graded(depth(&rest)?),
            "fingen" | "ramify" | "split" | "integral" => {
                let ext = sc.extension(&target).expect("declared");
                let need_below = ext.below.is_none();
                let need_above = word != "split" && ext.above.is_none();
                if need_below || need_above {
                    return Err(line.err(word, format!("extension {target} needs below and above valuations for {word}")));
                }
                match word {
                    "fingen" => CommandKind::Fingen(depth(&rest)?),
                    "ramify" => CommandKind::Ramify(depth(&rest)?),
                    "split" => CommandKind::Split,
                    _ => CommandKind::Integral(ring_elem(&rest, ext.map.target())?),
                }
            }
            other => return Err(line.err(other, "unknown command")),
        };
        Ok(Command { line: line.no, text: line.text.to_string(), target, kind })
    }
}

/// Splits at commas outside parentheses.
fn split_top(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn irrational(rest: &Line) -> Result<IrrationalDescriptor, ParseError> {
    if let Some((name, v)) = rest.assignment() {
        let (kind, arg) = v.after_word();
        return match kind {
            "pi" => Ok(IrrationalDescriptor::pi(name)),
            "sqrt" => {
                let n: u64 = number(&arg, "a positive integer")?;
                IrrationalDescriptor::sqrt(name, n).map_err(|e| arg.err(arg.text, e.to_string()))
            }
            other => Err(v.err(other, "expected pi or sqrt N")),
        };
    }
    let (name, table) = rest.after_word();
    let words: Vec<&str> = table.text.split_whitespace().collect();
    let mut intervals = Vec::new();
    let mut k = 0;
    while k < words.len() {
        let expect = if k == 0 { "interval" } else { "refine" };
        if words[k] != expect || k + 2 >= words.len() {
            return Err(table.err(words[k], format!("expected `{expect} LO HI`")));
        }
        let lo = parse_rational(words[k + 1]).ok_or_else(|| table.err(words[k + 1], "expected a rational"))?;
        let hi = parse_rational(words[k + 2]).ok_or_else(|| table.err(words[k + 2], "expected a rational"))?;
        intervals.push((lo, hi));
        k += 3;
    }
    IrrationalDescriptor::table(name, intervals).map_err(|e| rest.err(name, e.to_string()))
}

fn constant(v: &Line, tower: &Arc<ResidueTower>) -> Result<TowerElem, ParseError> {
    let p = parse_formal(v.text, &[], tower).map_err(|e| expr_err(e, v))?;
    let mut c = TowerElem::zero(tower);
    for x in p.terms().values() {
        c = &c + x;
    }
    Ok(c)
}

fn ring_elem(v: &Line, ctx: &Arc<LocalRingCtx>) -> Result<RingElem, ParseError> {
    if v.text.is_empty() {
        return Err(v.err("", "expected an element"));
    }
    let p = parse_formal(v.text, &ctx.params(), ctx.tower()).map_err(|e| expr_err(e, v))?;
    let f = RingElem::from_terms(ctx, p.terms().iter().map(|(e, c)| ((e[0], e[1]), c.clone())));
    f.check_residue().map_err(|e| v.err(v.text, e.to_string()))?;
    Ok(f)
}

/// `c·t^k + … [+ O(t^N)]`.
fn series(v: &Line, tower: &Arc<ResidueTower>) -> Result<TruncSeries, ParseError> {
    let (body, precision) = match v.text.find("O(") {
        Some(k) => {
            let head = v.text[..k].trim_end();
            let head = head.strip_suffix('+').ok_or_else(|| v.err("O(", "the order term must be added last"))?;
            let inner = v.text[k + 2..].trim_end().strip_suffix(')').ok_or_else(|| v.err("O(", "unclosed order term"))?;
            let n = inner.trim().strip_prefix("t^").and_then(|n| n.trim().parse::<i64>().ok());
            let n = n.ok_or_else(|| v.err(inner, "expected O(t^N)"))?;
            (v.sub(0, head.len()), Some(n))
        }
        None => (*v, None),
    };
    let p = parse_formal(body.text, &["t"], tower).map_err(|e| expr_err(e, &body))?;
    let terms = p.terms().iter().map(|(e, c)| (e[0] as i64, c.clone()));
    Ok(TruncSeries::new(tower, terms, precision))
}

/// `EXPR value V [alpha A]` where EXPR is monic in the newest key.
fn key_step(def: &Line, names: &[String], tower: &Arc<ResidueTower>, group: &ValueGroup) -> Result<KeyStep, ParseError> {
    let vk = def.text.find(" value ").ok_or_else(|| def.err(def.text, "expected `value V` after the key"))?;
    let ak = def.text.find(" alpha ");
    let expr = def.sub(0, vk);
    let value = def.sub(vk + 7, ak.unwrap_or(def.text.len()));
    let syms: Vec<&str> = names.iter().map(String::as_str).collect();
    let p = parse_formal(expr.text, &syms, tower).map_err(|e| expr_err(e, &expr))?;
    let last = names.len() - 1;
    let n = p.terms().keys().map(|e| e[last]).max().unwrap_or(0);
    let mut lead = vec![0u32; names.len()];
    lead[last] = n;
    if n == 0 || p.terms().get(&lead).is_none_or(|c| !c.is_one()) {
        return Err(expr.err(expr.text, format!("key must be monic in {}", names[last])));
    }
    let mut tail = Vec::new();
    for (e, c) in p.terms() {
        if *e == lead {
            continue;
        }
        if e[last] >= n {
            return Err(expr.err(expr.text, format!("only {}^{n} may carry the top power", names[last])));
        }
        tail.push(TailTerm { coeff: c.clone(), exps: e.clone() });
    }
    let beta_next = parse_value(value.text, group).map_err(|e| value.err(value.text, e.message))?;
    let alpha = match ak {
        Some(k) => Some(constant(&def.sub(k + 7, def.text.len()), tower)?),
        None => None,
    };
    Ok(KeyStep { n, tail, beta_next, alpha })
}

/// Convenience for callers holding a file path.
pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(path.display().to_string(), e.to_string()))?;
    parse_scenario(&text).map_err(ScenarioError::Parse)
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error("{0}")]
    Parse(ParseError),
}
