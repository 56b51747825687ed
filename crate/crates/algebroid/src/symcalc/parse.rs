//! Expression grammar and canonical printer.
//!
//! ```text
//! rational    ::= int | int "/" posint
//! monomial    ::= rational ("*" coordfactor)* | coordfactor ("*" coordfactor)*
//! coordfactor ::= name ("^" posint)?
//! ```
//! A term may end in a wedge chain of form generators `dx1^dx2` or a single
//! vector generator `d/dx1`. Terms are joined by `+`/`-`; whitespace is
//! ignored.

use super::{Chart, KForm, Mono, Poly, VField};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Result of parsing an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr<S> {
    Poly(Poly<S>),
    Form(KForm<S>),
    Field(VField<S>),
}

enum Gen {
    None,
    Form(Vec<usize>),
    Vector(usize),
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: Vec<usize>,
    at: usize,
    chart: &'a Chart,
}

impl<'a> Parser<'a> {
    fn new(text: &str, chart: &'a Chart) -> Self {
        let mut chars = Vec::new();
        let mut pos = Vec::new();
        for (i, c) in text.char_indices() {
            if !c.is_whitespace() {
                chars.push(c);
                pos.push(i);
            }
        }
        pos.push(text.len());
        Parser { chars, pos, at: 0, chart }
    }

    fn here(&self) -> usize {
        self.pos[self.at.min(self.chars.len())]
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.here(), msg))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.at + k).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<String> {
        let start = self.at;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.at += 1;
        }
        if start == self.at {
            return self.err("expected digits");
        }
        Ok(self.chars[start..self.at].iter().collect())
    }

    fn posint(&mut self) -> Result<u32> {
        let start = self.here();
        let d = self.digits()?;
        match d.parse::<u32>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::parse(start, format!("expected positive integer, got {d}"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.at;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.at += 1,
            _ => return self.err("expected a number, coordinate or generator"),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.at += 1;
        }
        Ok(self.chars[start..self.at].iter().collect())
    }

    fn differential(&self, name: &str) -> Option<usize> {
        if self.chart.index_of(name).is_some() {
            return None;
        }
        name.strip_prefix('d').and_then(|rest| self.chart.index_of(rest))
    }

    fn form_chain(&mut self, first: usize) -> Result<Vec<usize>> {
        let mut idx = vec![first];
        while self.peek() == Some('^') {
            self.at += 1;
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return self.err("a differential cannot be raised to a power");
            }
            let p = self.here();
            let name = self.ident()?;
            match self.differential(&name) {
                Some(i) => idx.push(i),
                None => return Err(Error::parse(p, format!("expected a differential, got {name}"))),
            }
        }
        Ok(idx)
    }

    fn term<S: Field>(&mut self) -> Result<(Poly<S>, Gen)> {
        let n = self.chart.dim();
        let mut coeff = S::one();
        let mut exps = vec![0u32; n];
        let mut gen = Gen::None;
        let mut first = true;
        loop {
            let p = self.here();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    if !first {
                        return self.err("a rational coefficient must come first in a term");
                    }
                    let num = self.digits()?;
                    let den = if self.peek() == Some('/') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit()) {
                        self.at += 1;
                        let dp = self.here();
                        let d = self.digits()?;
                        if d.chars().all(|c| c == '0') {
                            return Err(Error::parse(dp, "zero denominator"));
                        }
                        Some(d)
                    } else {
                        None
                    };
                    coeff = S::from_decimal(&num, den.as_deref())
                        .ok_or_else(|| Error::parse(p, "number out of range"))?;
                }
                _ => {
                    if !matches!(gen, Gen::None) {
                        return self.err("a generator must be the last factor of a term");
                    }
                    let name = self.ident()?;
                    if let Some(i) = self.chart.index_of(&name) {
                        let e = if self.eat('^') { self.posint()? } else { 1 };
                        exps[i] += e;
                    } else if name == "d" && self.peek() == Some('/') {
                        self.at += 1;
                        let q = self.here();
                        let v = self.ident()?;
                        match self.differential(&v) {
                            Some(i) => gen = Gen::Vector(i),
                            None => return Err(Error::parse(q, format!("expected d<coordinate>, got {v}"))),
                        }
                    } else if let Some(i) = self.differential(&name) {
                        gen = Gen::Form(self.form_chain(i)?);
                    } else {
                        return Err(Error::parse(p, format!("unknown coordinate name {name}")));
                    }
                }
            }
            first = false;
            if !self.eat('*') {
                break;
            }
        }
        Ok((Poly::monomial(Mono(exps), coeff), gen))
    }

    fn expr<S: Field>(&mut self) -> Result<Expr<S>> {
        let n = self.chart.dim();
        if self.chars.is_empty() {
            return self.err("empty expression");
        }
        let mut acc: Option<Expr<S>> = None;
        let mut first = true;
        loop {
            let start = self.here();
            let neg = if self.eat('-') {
                true
            } else if self.eat('+') {
                false
            } else if first {
                false
            } else {
                return self.err("expected + or -");
            };
            let (mut c, gen) = self.term::<S>()?;
            if neg {
                c = -c;
            }
            let t = match gen {
                Gen::None => Expr::Poly(c),
                Gen::Form(idx) => {
                    let mut w = KForm::zero(self.chart, idx.len());
                    w.add_component(idx, c);
                    Expr::Form(w)
                }
                Gen::Vector(i) => {
                    let mut v = VField::zero(self.chart);
                    v.comps[i] = c;
                    Expr::Field(v)
                }
            };
            acc = Some(match (acc, t) {
                (None, t) => t,
                (Some(Expr::Poly(a)), Expr::Poly(b)) => Expr::Poly(a + b),
                (Some(Expr::Form(a)), Expr::Form(b)) if a.degree() == b.degree() => Expr::Form(a.add(&b)?),
                (Some(Expr::Field(a)), Expr::Field(b)) => Expr::Field(a.add(&b)),
                _ => return Err(Error::parse(start, "degree mismatch in a sum")),
            });
            first = false;
            if self.peek().is_none() {
                break;
            }
        }
        let out = acc.unwrap_or_else(|| Expr::Poly(Poly::zero(n)));
        Ok(out)
    }
}

/// Parses a polynomial, form or vector field expression over `chart`.
pub fn parse_expr<S: Field>(text: &str, chart: &Chart) -> Result<Expr<S>> {
    let mut p = Parser::new(text, chart);
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

fn is_zero_expr<S: Field>(e: &Expr<S>) -> bool {
    match e {
        Expr::Poly(p) => p.is_zero(),
        Expr::Form(w) => w.is_zero(),
        Expr::Field(v) => v.is_zero(),
    }
}

pub fn parse_poly<S: Field>(text: &str, chart: &Chart) -> Result<Poly<S>> {
    match parse_expr(text, chart)? {
        Expr::Poly(p) => Ok(p),
        e if is_zero_expr(&e) => Ok(Poly::zero(chart.dim())),
        _ => Err(Error::parse(0, "expected a polynomial")),
    }
}

/// Parses a form of the given degree; a zero expression of any kind is
/// accepted as the zero form.
pub fn parse_form<S: Field>(text: &str, chart: &Chart, degree: usize) -> Result<KForm<S>> {
    match parse_expr(text, chart)? {
        Expr::Form(w) if w.degree() == degree => Ok(w),
        Expr::Poly(p) if degree == 0 => Ok(KForm::function(chart, p)),
        e if is_zero_expr(&e) => Ok(KForm::zero(chart, degree)),
        _ => Err(Error::parse(0, format!("expected a form of degree {degree}"))),
    }
}

pub fn parse_vfield<S: Field>(text: &str, chart: &Chart) -> Result<VField<S>> {
    match parse_expr(text, chart)? {
        Expr::Field(v) => Ok(v),
        e if is_zero_expr(&e) => Ok(VField::zero(chart)),
        _ => Err(Error::parse(0, "expected a vector field")),
    }
}

fn mono_str(m: &Mono, chart: &Chart) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(chart.coords()[i].clone()),
            _ => parts.push(format!("{}^{}", chart.coords()[i], e)),
        }
    }
    parts.join("*")
}

/// Pushes signed terms `(negative, body)` for `c·m·gen`.
fn push_terms<S: Field>(out: &mut Vec<(bool, String)>, p: &Poly<S>, chart: &Chart, gen: &str) {
    for (m, c) in p.terms() {
        let neg = c.is_negative();
        let abs = if neg { -c.clone() } else { c.clone() };
        let ms = mono_str(m, chart);
        let unit = abs == S::one();
        let mut body = match (unit, ms.is_empty()) {
            (true, true) => String::new(),
            (true, false) => ms,
            (false, true) => abs.to_string(),
            (false, false) => format!("{abs}*{ms}"),
        };
        if !gen.is_empty() {
            if body.is_empty() {
                body = gen.to_string();
            } else {
                body = format!("{body}*{gen}");
            }
        } else if body.is_empty() {
            body = "1".to_string();
        }
        out.push((neg, body));
    }
}

fn join_terms(terms: &[(bool, String)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, (neg, body)) in terms.iter().enumerate() {
        if k == 0 {
            if *neg {
                s.push('-');
            }
        } else {
            s.push_str(if *neg { " - " } else { " + " });
        }
        s.push_str(body);
    }
    s
}

pub fn print_poly<S: Field>(p: &Poly<S>, chart: &Chart) -> String {
    let mut t = Vec::new();
    push_terms(&mut t, p, chart, "");
    join_terms(&t)
}

pub fn print_form<S: Field>(w: &KForm<S>) -> String {
    if w.degree() == 0 {
        return print_poly(&w.as_function(), &w.chart);
    }
    let mut t = Vec::new();
    for (idx, c) in w.components() {
        let gen: Vec<String> = idx.iter().map(|&i| format!("d{}", w.chart.coords()[i])).collect();
        push_terms(&mut t, c, &w.chart, &gen.join("^"));
    }
    join_terms(&t)
}

pub fn print_vfield<S: Field>(v: &VField<S>) -> String {
    let mut t = Vec::new();
    for (i, c) in v.comps.iter().enumerate() {
        push_terms(&mut t, c, &v.chart, &format!("d/d{}", v.chart.coords()[i]));
    }
    join_terms(&t)
}

pub fn print_expr<S: Field>(e: &Expr<S>, chart: &Chart) -> String {
    match e {
        Expr::Poly(p) => print_poly(p, chart),
        Expr::Form(w) => print_form(w),
        Expr::Field(v) => print_vfield(v),
    }
}
