//! Text format for decorated graphs and their linear combinations.
//!
//! ```text
//! sum      := term (("+"|"-") term)* | "0"
//! term     := [rational "*"] ["c" nat "*"] graph
//! graph    := bracket+
//! bracket  := "<" item (" " item)* ">" "_" nat ["[" kappas "]"]
//! item     := name ["^" nat]
//! name     := nat | "e" nat
//! kappas   := "k" nat ("," "k" nat)*
//! rational := ["-"] nat ["/" nat]
//! ```
//!
//! `<1 2 e0>_0 <3 4 e1>_0 <e0 e1>_1` is the genus-one graph with two rational
//! tails. A `c<nat>` factor makes the coefficient symbolic.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::formal_sum::{FormalSum, LinearForm, SymbolicSum};
use crate::graph::{DecoratedGraph, HalfEdge, Label, Vertex};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("gwi parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits"))
        }
    }

    fn nat(&mut self) -> Result<u32, ParseError> {
        let at = self.pos;
        match self.digits() {
            Some(d) => d.parse().map_err(|_| ParseError { pos: at, msg: "number too large".into() }),
            None => self.err("expected a natural number"),
        }
    }

    fn big_nat(&mut self) -> Result<BigInt, ParseError> {
        match self.digits() {
            Some(d) => Ok(d.parse().expect("digits parse as BigInt")),
            None => self.err("expected a natural number"),
        }
    }

    fn at_end(&mut self) -> bool {
        self.ws();
        self.pos >= self.s.len()
    }

    /// Parses one graph (a run of brackets).
    fn graph(&mut self) -> Result<DecoratedGraph, ParseError> {
        let mut vertices = Vec::new();
        let mut half_edges = Vec::new();
        let mut internal: BTreeMap<u32, (u32, usize)> = BTreeMap::new();
        self.ws();
        if self.peek() != Some(b'<') {
            return self.err("expected '<'");
        }
        while {
            self.ws();
            self.peek() == Some(b'<')
        } {
            self.pos += 1;
            let v = vertices.len();
            let mut items = Vec::new();
            loop {
                self.ws();
                if self.eat(b'>') {
                    break;
                }
                let label = if self.eat(b'e') {
                    let at = self.pos;
                    let raw = self.nat()?;
                    let entry = internal.entry(raw).or_insert((0, at));
                    entry.0 += 1;
                    if entry.0 > 2 {
                        return Err(ParseError { pos: at, msg: format!("e{raw} used more than twice") });
                    }
                    Label::Internal(raw)
                } else {
                    let at = self.pos;
                    let l = self.nat()?;
                    if l == 0 {
                        return Err(ParseError { pos: at, msg: "external labels start at 1".into() });
                    }
                    Label::External(l)
                };
                let psi = if self.eat(b'^') { self.nat()? } else { 0 };
                items.push(HalfEdge { vertex: v, label, psi });
            }
            self.expect(b'_')?;
            let genus = self.nat()?;
            let mut kappa = Vec::new();
            if self.eat(b'[') {
                loop {
                    self.ws();
                    self.expect(b'k')?;
                    let at = self.pos;
                    let a = self.nat()?;
                    if a == 0 {
                        return Err(ParseError { pos: at, msg: "κ subscripts start at 1".into() });
                    }
                    kappa.push(a);
                    self.ws();
                    if self.eat(b']') {
                        break;
                    }
                    self.expect(b',')?;
                }
            }
            vertices.push(Vertex::new(genus, kappa));
            half_edges.extend(items);
        }
        for (raw, (count, at)) in &internal {
            if *count != 2 {
                return Err(ParseError { pos: *at, msg: format!("e{raw} must occur exactly twice") });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for h in &half_edges {
            if let Label::External(l) = h.label {
                if !seen.insert(l) {
                    return self.err(format!("external label {l} repeated"));
                }
            }
        }
        Ok(DecoratedGraph::new(vertices, half_edges))
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let num = self.big_nat()?;
        let den = if self.eat(b'/') { self.big_nat()? } else { BigInt::one() };
        if den.is_zero() {
            return self.err("zero denominator");
        }
        Ok(Rational::new(num, den))
    }

    /// Parses a term after its sign has been consumed.
    fn term(&mut self, negative: bool) -> Result<(Rational, Option<u32>, DecoratedGraph), ParseError> {
        self.ws();
        let mut coeff = Rational::one();
        if matches!(self.peek(), Some(b'0'..=b'9')) {
            coeff = self.rational()?;
            self.ws();
            self.expect(b'*')?;
            self.ws();
        }
        let mut unknown = None;
        if self.eat(b'c') {
            let at = self.pos;
            let i = self.nat()?;
            if i == 0 {
                return Err(ParseError { pos: at, msg: "unknowns are numbered from c1".into() });
            }
            unknown = Some(i - 1);
            self.ws();
            self.expect(b'*')?;
        }
        let g = self.graph()?;
        Ok((if negative { -coeff } else { coeff }, unknown, g))
    }

    fn sum(&mut self) -> Result<Vec<(Rational, Option<u32>, DecoratedGraph)>, ParseError> {
        self.ws();
        let save = self.pos;
        if self.eat(b'0') {
            if self.at_end() {
                return Ok(Vec::new());
            }
            self.pos = save;
        }
        let mut out = Vec::new();
        let neg = self.eat(b'-');
        out.push(self.term(neg)?);
        loop {
            self.ws();
            if self.eat(b'+') {
                out.push(self.term(false)?);
            } else if self.eat(b'-') {
                out.push(self.term(true)?);
            } else {
                break;
            }
        }
        if !self.at_end() {
            return self.err("trailing input");
        }
        Ok(out)
    }
}

pub fn parse_graph(s: &str) -> Result<DecoratedGraph, ParseError> {
    let mut p = Parser::new(s);
    let g = p.graph()?;
    if !p.at_end() {
        return p.err("trailing input after graph");
    }
    Ok(g)
}

pub fn parse_sum(s: &str) -> Result<FormalSum, ParseError> {
    let mut p = Parser::new(s);
    let mut out = FormalSum::new();
    for (c, unknown, g) in p.sum()? {
        if unknown.is_some() {
            return Err(ParseError { pos: 0, msg: "symbolic coefficient in a numeric sum".into() });
        }
        out.add_term(&g, c);
    }
    Ok(out)
}

pub fn parse_symbolic(s: &str) -> Result<SymbolicSum, ParseError> {
    let mut p = Parser::new(s);
    let mut out = SymbolicSum::new();
    for (c, unknown, g) in p.sum()? {
        match unknown {
            Some(i) => out.add_term(&g, &LinearForm::single(i as usize, c)),
            None => return Err(ParseError { pos: 0, msg: "every term of a symbolic sum needs a c<n> factor".into() }),
        }
    }
    Ok(out)
}

/// Reads a file body: `#` comments and blank lines are skipped, remaining
/// lines are joined into one sum.
pub fn parse_document(text: &str) -> Result<FormalSum, ParseError> {
    let body: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    if body.is_empty() {
        return Ok(FormalSum::new());
    }
    parse_sum(&body.join(" "))
}

pub fn format_graph(g: &DecoratedGraph) -> String {
    let mut out = String::new();
    for (v, vert) in g.vertices.iter().enumerate() {
        if v > 0 {
            out.push(' ');
        }
        out.push('<');
        let mut first = true;
        for h in g.half_edges.iter().filter(|h| h.vertex == v) {
            if !first {
                out.push(' ');
            }
            first = false;
            match h.label {
                Label::External(l) => write!(out, "{l}").unwrap(),
                Label::Internal(i) => write!(out, "e{i}").unwrap(),
            }
            if h.psi > 0 {
                write!(out, "^{}", h.psi).unwrap();
            }
        }
        write!(out, ">_{}", vert.genus).unwrap();
        if !vert.kappa.is_empty() {
            let ks: Vec<String> = vert.kappa.iter().map(|a| format!("k{a}")).collect();
            write!(out, "[{}]", ks.join(",")).unwrap();
        }
    }
    out
}

fn write_coefficient(out: &mut String, first: bool, c: &Rational, symbol: Option<usize>) {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(out, "-{a}*").unwrap();
        } else if !a.is_one() {
            write!(out, "{a}*").unwrap();
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
        if !a.is_one() {
            write!(out, "{a}*").unwrap();
        }
    }
    if let Some(i) = symbol {
        write!(out, "c{}*", i + 1).unwrap();
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (n, (k, c)) in self.iter().enumerate() {
            write_coefficient(&mut out, n == 0, c, None);
            out.push_str(&format_graph(k));
        }
        f.write_str(&out)
    }
}

impl fmt::Display for SymbolicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        let mut first = true;
        for (k, form) in self.iter() {
            for (i, c) in form.iter() {
                write_coefficient(&mut out, first, c, Some(i));
                first = false;
                out.push_str(&format_graph(k));
            }
        }
        f.write_str(&out)
    }
}

/// One term per line, for files that are read back by [`parse_document`].
pub fn format_document(s: &FormalSum) -> String {
    if s.is_zero() {
        return "0\n".to_string();
    }
    let mut out = String::new();
    for (n, (k, c)) in s.iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        let mut line = String::new();
        write_coefficient(&mut line, n == 0, c, None);
        out.push_str(line.trim_start());
        out.push_str(&format_graph(k));
    }
    out.push('\n');
    out
}
