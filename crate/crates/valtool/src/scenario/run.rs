//! Command dispatch and report rendering.

use std::fmt::Write as _;

use super::{Command, CommandKind, Scenario};
use crate::arith::Value;
use crate::blowup::iterate_transforms;
use crate::extension::{ramification_report, splitting_report, Candidate, ExtensionError, SplitOptions};
use crate::genseq::{evaluate, expand, validate_sequence, CheckOutcome, GenSeq, GenSeqError};
use crate::graded::{fingen_detect, graded_presentation, integral_relation, GradedError};
use crate::ring::OracleValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Dot,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Depth for commands that do not give one.
    pub depth: usize,
    pub seed: u64,
    pub value_bound: Option<Value>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { depth: 4, seed: 0, value_bound: None }
    }
}

/// Outcome of one command.
#[derive(Clone, Debug, Default)]
pub struct Section {
    pub line: usize,
    pub command: String,
    pub target: String,
    pub text: String,
    pub csv: Vec<String>,
    pub dot: Option<String>,
    pub warnings: Vec<String>,
    pub fault: Option<String>,
}

impl Section {
    /// `command (line N)`, naming the target when the command did not.
    pub fn heading(&self) -> String {
        if self.command.contains(" on ") {
            format!("{} (line {})", self.command, self.line)
        } else {
            format!("{} on {} (line {})", self.command, self.target, self.line)
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub warnings: Vec<String>,
    pub sections: Vec<Section>,
}

/// Rendered report together with what the caller needs for an exit code.
#[derive(Clone, Debug)]
pub struct Output {
    pub body: String,
    pub faults: usize,
}

impl Report {
    pub fn faults(&self) -> usize {
        self.sections.iter().filter(|s| s.fault.is_some()).count()
    }

    pub fn render(&self, format: Format) -> Output {
        let body = match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Dot => self.dot(),
        };
        Output { body, faults: self.faults() }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        for s in &self.sections {
            if !out.is_empty() {
                out.push('\n');
            }
            writeln!(out, "== {} ==", s.heading()).unwrap();
            out.push_str(&s.text);
            if !s.text.is_empty() && !s.text.ends_with('\n') {
                out.push('\n');
            }
            for w in &s.warnings {
                writeln!(out, "warning: {w}").unwrap();
            }
            if let Some(f) = &s.fault {
                writeln!(out, "FAULT: {f}").unwrap();
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut blocks = Vec::new();
        for s in &self.sections {
            let mut b = format!("# {}\n", s.heading());
            match &s.fault {
                Some(f) => {
                    b.push_str("fault\n");
                    b.push_str(&csv_row(&[f]));
                }
                None => {
                    for t in &s.csv {
                        b.push_str(t);
                    }
                }
            }
            blocks.push(b);
        }
        blocks.join("\n")
    }

    fn dot(&self) -> String {
        let mut out = String::from("digraph transforms {\n  rankdir=LR;\n");
        for (k, s) in self.sections.iter().enumerate() {
            if let Some(d) = &s.dot {
                writeln!(out, "  subgraph cluster_{k} {{\n    label={};", dot_quote(&s.heading())).unwrap();
                out.push_str(d);
                out.push_str("  }\n");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Quotes a field when it holds a comma, a quote or a line break.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row<S: AsRef<str>>(fields: &[S]) -> String {
    let mut row = fields.iter().map(|f| csv_field(f.as_ref())).collect::<Vec<_>>().join(",");
    row.push('\n');
    row
}

fn csv_table<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> String {
    let mut t = csv_row(header);
    for r in rows {
        t.push_str(&csv_row(r));
    }
    t
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Runs every command in order. A failing command gets a fault section and
/// the run moves on.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Report {
    let mut rep = Report::default();
    let assumed = sc.tower.assumed_levels();
    if !assumed.is_empty() {
        rep.warnings.push(format!("irreducibility assumed for {}", assumed.join(", ")));
    }
    for cmd in &sc.commands {
        let mut s = Section { line: cmd.line, command: cmd.text.clone(), target: cmd.target.clone(), ..Section::default() };
        if let Err(e) = dispatch(sc, cmd, opts, &mut s) {
            s.fault = Some(e);
        }
        rep.sections.push(s);
    }
    rep
}

fn dispatch(sc: &Scenario, cmd: &Command, opts: &RunOptions, s: &mut Section) -> Result<(), String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let depth = |d: &Option<usize>| d.unwrap_or(opts.depth);
    let seq = || sc.valuation(&cmd.target).expect("checked at parse time");
    match &cmd.kind {
        CommandKind::Validate => {
            let g = seq();
            let v = validate_sequence(g).map_err(|e| err(&e))?;
            s.text = v.to_string();
            let rows: Vec<Vec<String>> = v
                .checks
                .iter()
                .map(|c| {
                    let o = match c.outcome {
                        CheckOutcome::Pass => "pass",
                        CheckOutcome::Fail => "fail",
                        CheckOutcome::Skipped => "skip",
                    };
                    vec![opt(c.level), c.name.to_string(), o.to_string(), c.detail.clone()]
                })
                .collect();
            s.csv.push(csv_table(&["level", "check", "outcome", "detail"], &rows));
            if !v.passed() {
                let n = v.failures().count();
                return Err(format!("{n} check(s) failed"));
            }
        }
        CommandKind::Eval(f) => {
            let g = seq();
            let (shown, value) = match evaluate(f, g) {
                Ok(v) => (v.to_string(), Some(v)),
                Err(GenSeqError::InsufficientData(why)) => (format!("undecided ({why})"), None),
                Err(e) => return Err(err(&e)),
            };
            writeln!(s.text, "value {shown}").unwrap();
            let mut oracle = String::new();
            if let Some(o) = g.oracle() {
                oracle = match o.oracle_value(f).map_err(|e| err(&e))? {
                    OracleValue::Exact(v) => {
                        if value.as_ref().is_some_and(|mine| *mine != v) {
                            s.warnings.push(format!("oracle gives {v}"));
                        }
                        v.to_string()
                    }
                    OracleValue::AtLeast(v) => format!(">= {v}"),
                    OracleValue::Undecided(why) => format!("undecided ({why})"),
                };
                writeln!(s.text, "oracle value {oracle}").unwrap();
            }
            s.csv.push(csv_table(&["element", "value", "oracle"], &[vec![f.to_string(), shown, oracle]]));
        }
        CommandKind::Expand(f) => {
            let g = seq();
            let e = expand(f, g).map_err(|e| err(&e))?;
            let mut rows = Vec::new();
            for t in &e.terms {
                let m = g.monomial_name(&t.exps);
                writeln!(s.text, "{:<12} {:<20} value {}", t.coeff.to_string(), m, t.value).unwrap();
                rows.push(vec![t.coeff.to_string(), m, t.value.to_string()]);
            }
            if e.terms.is_empty() {
                s.text.push_str("zero\n");
            }
            if e.has_unreduced(g) {
                s.warnings.push("the top key exponent is not reduced".into());
            }
            s.csv.push(csv_table(&["coeff", "monomial", "value"], &rows));
        }
        CommandKind::Blowup(n) => {
            let g = seq();
            let rec = iterate_transforms(g, *n);
            s.text = rec.to_string();
            let mut rows = Vec::new();
            let mut dot = String::new();
            let node = |k: usize| dot_quote(&format!("{}:{k}", cmd.target));
            for (k, st) in rec.steps.iter().enumerate() {
                for r in &st.table {
                    rows.push(vec![
                        (k + 1).to_string(),
                        r.level.to_string(),
                        r.beta.to_string(),
                        r.nbar.0.to_string(),
                        r.nbar.1.to_string(),
                        opt(r.d.0),
                        opt(r.d.1),
                        opt(r.n.0),
                        opt(r.n.1),
                        r.holds.to_string(),
                    ]);
                }
                let m = &st.map;
                let [(xa, xb), (ya, yb)] = m.forward();
                let p = m.source().params();
                let q = m.chart().params();
                if k == 0 {
                    writeln!(dot, "    {} [label={}];", node(0), dot_quote(&node_label(&st.source))).unwrap();
                }
                writeln!(dot, "    {} [label={}];", node(k + 1), dot_quote(&node_label(&st.target))).unwrap();
                let label = format!("{}={}^{xa}{}^{xb}, {}={}^{ya}{}^{yb}", q[0], p[0], p[1], q[1], p[0], p[1]);
                let style = if st.holds() { "" } else { ", color=red" };
                writeln!(dot, "    {} -> {} [label={}{style}];", node(k), node(k + 1), dot_quote(&label)).unwrap();
            }
            s.csv.push(csv_table(
                &["step", "level", "beta", "nbar_target", "nbar_source", "d_target", "d_source", "n_target", "n_source", "holds"],
                &rows,
            ));
            s.dot = Some(dot);
            if let Some(t) = &rec.truncated {
                s.warnings.push(format!("stopped after {} step(s): {t}", rec.len()));
            }
            if !rec.holds() {
                s.warnings.push("the shift table does not hold at every step".into());
            }
        }
        CommandKind::Graded(d) => {
            let g = seq();
            let pres = graded_presentation(g, depth(d)).map_err(|e| err(&e))?;
            s.text = pres.to_string();
            let mut rows: Vec<Vec<String>> = pres
                .generators
                .iter()
                .map(|x| vec!["generator".into(), format!("in({})", x.name), x.value.to_string(), String::new()])
                .collect();
            for r in &pres.relations {
                let v = opt(r.vanishes);
                rows.push(vec!["relation".into(), pres.relation_text(r), r.value.to_string(), v]);
            }
            s.csv.push(csv_table(&["kind", "form", "value", "vanishes"], &rows));
            if !pres.holds() {
                return Err("a relation does not vanish".into());
            }
        }
        CommandKind::Fingen(d) => {
            let (r, g) = pair(sc, cmd);
            let ext = &sc.extension(&cmd.target).expect("declared").map;
            let st = fingen_detect(r, g, ext, depth(d)).map_err(|e: GradedError| err(&e))?;
            s.text = st.to_string();
            let rows: Vec<Vec<String>> = st
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.s.to_string(),
                        l.tau.to_string(),
                        l.gamma.to_string(),
                        opt(l.r),
                        opt(l.sigma),
                        l.lambda.to_string(),
                        l.chi.to_string(),
                    ]
                })
                .collect();
            s.csv.push(csv_table(&["s", "tau", "gamma", "r", "sigma", "lambda", "chi"], &rows));
            s.csv.push(csv_table(&["verdict", "monotone"], &[vec![st.verdict.to_string(), st.monotone.to_string()]]));
            if !st.monotone {
                s.warnings.push("lambda or chi increased between levels".into());
            }
        }
        CommandKind::Ramify(d) => {
            let (r, g) = pair(sc, cmd);
            let ext = &sc.extension(&cmd.target).expect("declared").map;
            let rep = ramification_report(r, g, ext, depth(d)).map_err(|e: ExtensionError| err(&e))?;
            s.text = format!("{rep}{}", rep.alignment);
            s.csv.push(rep.csv());
        }
        CommandKind::Split => {
            let decl = sc.extension(&cmd.target).expect("declared");
            let r = sc.valuation(decl.below.as_deref().expect("checked at parse time")).expect("declared");
            let cands: Vec<Candidate> = decl
                .candidates
                .iter()
                .map(|c| match sc.valuation(c) {
                    Some(g) => Candidate::seq(c, g.clone()),
                    None => Candidate::series(c, sc.embedding(c).expect("declared").clone()),
                })
                .collect();
            if cands.is_empty() {
                return Err("no candidates declared".into());
            }
            let so = SplitOptions { seed: opts.seed, value_bound: opts.value_bound.clone(), ..SplitOptions::default() };
            let rep = splitting_report(&cands, &decl.map, r, &so).map_err(|e| err(&e))?;
            s.text = rep.to_string();
            let rows: Vec<Vec<String>> = rep
                .candidates
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.restricts().to_string(),
                        c.checked.to_string(),
                        c.agreed.to_string(),
                        c.undecided.to_string(),
                        c.mismatches.len().to_string(),
                        c.rejection.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            s.csv.push(csv_table(&["candidate", "restricts", "checked", "agreed", "undecided", "mismatches", "rejection"], &rows));
            s.csv.push(csv_table(&["distinct", "splitting"], &[vec![rep.distinct().to_string(), rep.splitting().to_string()]]));
        }
        CommandKind::Integral(f) => {
            let (r, g) = pair(sc, cmd);
            let ext = &sc.extension(&cmd.target).expect("declared").map;
            let rel = integral_relation(f, r, g, ext).map_err(|e| err(&e))?;
            writeln!(s.text, "{rel}").unwrap();
            writeln!(s.text, "degree {}, value {}, {}", rel.degree(), rel.value, if rel.vanishes { "vanishes" } else { "DOES NOT VANISH" }).unwrap();
            s.csv.push(csv_table(
                &["element", "degree", "relation", "vanishes"],
                &[vec![f.to_string(), rel.degree().to_string(), rel.to_string(), rel.vanishes.to_string()]],
            ));
            if !rel.vanishes {
                return Err("the relation does not vanish".into());
            }
        }
    }
    Ok(())
}

fn node_label(g: &GenSeq) -> String {
    let p = g.ctx().params();
    format!("{} ({}, {}) beta {}, {}", g.ctx().name(), p[0], p[1], g.beta(0), g.beta(1))
}

fn pair<'a>(sc: &'a Scenario, cmd: &Command) -> (&'a GenSeq, &'a GenSeq) {
    let decl = sc.extension(&cmd.target).expect("declared");
    let below = sc.valuation(decl.below.as_deref().expect("checked at parse time")).expect("declared");
    let above = sc.valuation(decl.above.as_deref().expect("checked at parse time")).expect("declared");
    (below, above)
}
