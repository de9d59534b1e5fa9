//! Infix polynomial grammar: `+ - * / ^`, parentheses, implicit products,
//! integer literals, declared symbols and tower generator names.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigInt, Zero};
use thiserror::Error;

use crate::arith::{Rat, ResidueTower, TowerElem};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub token: String,
    pub message: String,
}

impl ParseError {
    pub fn new(col: usize, token: &str, message: impl Into<String>) -> Self {
        ParseError { line: 1, col, token: token.to_string(), message: message.into() }
    }

    /// Moves a column-relative error to a position inside a larger file.
    pub fn at(mut self, line: usize, col_offset: usize) -> Self {
        self.line = line;
        self.col += col_offset;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} (at `{}`)", self.line, self.col, self.message, self.token)
    }
}

/// Polynomial in named symbols with tower coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalPoly {
    nvars: usize,
    tower: Arc<ResidueTower>,
    terms: BTreeMap<Vec<u32>, TowerElem>,
}

impl FormalPoly {
    fn zero(nvars: usize, t: &Arc<ResidueTower>) -> Self {
        FormalPoly { nvars, tower: t.clone(), terms: BTreeMap::new() }
    }

    fn constant(nvars: usize, c: TowerElem) -> Self {
        let mut p = FormalPoly::zero(nvars, &c.tower().clone());
        p.add_term(vec![0; nvars], c);
        p
    }

    fn var(nvars: usize, k: usize, t: &Arc<ResidueTower>) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = FormalPoly::zero(nvars, t);
        p.add_term(e, TowerElem::one(t));
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, TowerElem> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Vec<u32>, TowerElem> {
        self.terms
    }

    fn add_term(&mut self, e: Vec<u32>, c: TowerElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn add(mut self, o: FormalPoly) -> Self {
        for (e, c) in o.terms {
            self.add_term(e, c);
        }
        self
    }

    fn neg(self) -> Self {
        let terms = self.terms.into_iter().map(|(e, c)| (e, -c)).collect();
        FormalPoly { terms, ..self }
    }

    fn mul(&self, o: &FormalPoly) -> Self {
        let mut r = FormalPoly::zero(self.nvars, &self.tower);
        for (e, c) in &self.terms {
            for (f, d) in &o.terms {
                let g = e.iter().zip(f).map(|(a, b)| a + b).collect();
                r.add_term(g, c * d);
            }
        }
        r
    }

    fn as_constant(&self) -> Option<TowerElem> {
        if self.terms.is_empty() {
            return Some(TowerElem::zero(&self.tower));
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|x| *x == 0) {
                return Some(c.clone());
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize, String)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Num(s.parse().unwrap()), start + 1, s));
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Ident(s.clone()), start + 1, s));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), start + 1, c.to_string()));
            i += 1;
        } else {
            return Err(ParseError::new(start + 1, &c.to_string(), "unexpected character"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, String)>,
    pos: usize,
    symbols: &'a [&'a str],
    tower: &'a Arc<ResidueTower>,
    end_col: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err(&self, msg: &str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((_, col, s)) => ParseError::new(*col, s, msg),
            None => ParseError::new(self.end_col, "<end>", msg),
        }
    }

    fn expr(&mut self) -> Result<FormalPoly, ParseError> {
        let n = self.symbols.len();
        let mut acc = FormalPoly::zero(n, self.tower);
        let mut sign_neg = false;
        if let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            sign_neg = *c == '-';
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc = acc.add(if sign_neg { t.neg() } else { t });
            match self.peek() {
                Some(Tok::Op('+')) => sign_neg = false,
                Some(Tok::Op('-')) => sign_neg = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<FormalPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let at = self.pos;
                    let f = self.factor()?;
                    let c = f.as_constant().filter(|c| !c.is_zero()).ok_or_else(|| {
                        let (_, col, s) = &self.toks[at];
                        ParseError::new(*col, s, "division only by a nonzero constant")
                    })?;
                    let inv = c.inv().map_err(|e| self.err(&e.to_string()))?;
                    acc = acc.mul(&FormalPoly::constant(self.symbols.len(), inv));
                }
                Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('(')) => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<FormalPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Op('^')) {
            return Ok(base);
        }
        self.pos += 1;
        let paren = self.peek() == Some(&Tok::Op('('));
        if paren {
            self.pos += 1;
        }
        let neg = self.peek() == Some(&Tok::Op('-'));
        if neg {
            self.pos += 1;
        }
        let e = match self.peek() {
            Some(Tok::Num(n)) => {
                let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                self.pos += 1;
                e
            }
            _ => return Err(self.err("expected an integer exponent")),
        };
        if paren {
            if self.peek() != Some(&Tok::Op(')')) {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
        }
        let b = if neg {
            let c = base.as_constant().filter(|c| !c.is_zero()).ok_or_else(|| self.err("negative exponent of a non-constant"))?;
            FormalPoly::constant(self.symbols.len(), c.inv().map_err(|e| self.err(&e.to_string()))?)
        } else {
            base
        };
        let mut acc = FormalPoly::constant(self.symbols.len(), TowerElem::one(self.tower));
        for _ in 0..e {
            acc = acc.mul(&b);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<FormalPoly, ParseError> {
        let n = self.symbols.len();
        let Some((tok, col, s)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err("unexpected end of expression"));
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                let c = TowerElem::from_rat(self.tower, &Rat::from_integer(v))
                    .map_err(|e| ParseError::new(col, &s, e.to_string()))?;
                Ok(FormalPoly::constant(n, c))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(k) = self.symbols.iter().position(|x| *x == name) {
                    return Ok(FormalPoly::var(n, k, self.tower));
                }
                if let Some(l) = self.tower.level_index(&name) {
                    return Ok(FormalPoly::constant(n, TowerElem::generator(self.tower, l)));
                }
                Err(ParseError::new(col, &s, "undeclared name"))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Op('-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Tok::Op(_) => Err(ParseError::new(col, &s, "unexpected operator")),
        }
    }
}

/// Parses `text` as a polynomial in `symbols` over `tower`.
pub fn parse_formal(
    text: &str,
    symbols: &[&str],
    tower: &Arc<ResidueTower>,
) -> Result<FormalPoly, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, symbols, tower, end_col: text.chars().count() + 1 };
    if p.toks.is_empty() {
        return Err(ParseError::new(1, "<end>", "empty expression"));
    }
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err("unexpected token"));
    }
    Ok(e)
}

/// `p`, `-p` or `p/q` as an exact rational.
pub fn parse_rational(text: &str) -> Option<Rat> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}
