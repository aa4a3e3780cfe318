//! Multivariate polynomials with integer coefficients.
//!
//! Variables are `x1, x2, ...` (0-based internally); `x`, `y`, `z`, `w` are
//! accepted as aliases for the first four. Input strings use `+ - * ^` and
//! parentheses; juxtaposition such as `2x1` or `3(x+1)` multiplies, and an
//! equation `lhs = rhs` parses to `lhs - rhs`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FqElem};

/// Sparse polynomial: exponent vector (trailing zeros trimmed) to nonzero
/// coefficient.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, i64>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn overflow() -> Error {
    Error::InvalidParameter {
        field: "polynomial",
        reason: "integer coefficient overflow".into(),
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    /// The variable `x_{i+1}`.
    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, 1);
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], i64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    /// Number of variables actually referenced (highest index + 1).
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e.get(i).copied().unwrap_or(0) > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    fn insert(&mut self, e: Vec<u32>, c: i64) -> Result<()> {
        let e = trim(e);
        let entry = self.terms.entry(e.clone()).or_insert(0);
        *entry = entry.checked_add(c).ok_or_else(overflow)?;
        if *entry == 0 {
            self.terms.remove(&e);
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.insert(e.clone(), c)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let n = e1.len().max(e2.len());
                let e: Vec<u32> = (0..n)
                    .map(|i| e1.get(i).unwrap_or(&0) + e2.get(i).unwrap_or(&0))
                    .collect();
                out.insert(e, c1.checked_mul(c2).ok_or_else(overflow)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Poly> {
        let mut out = Poly::constant(1);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Formal partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, &c) in &self.terms {
            let k = e.get(i).copied().unwrap_or(0);
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            // Coefficients stay bounded by the input times the degree.
            out.insert(e2, c * k as i64).expect("derivative overflow");
        }
        out
    }

    /// Renames `x_i` to `x_{i+offset}`.
    pub fn shift(&self, offset: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                if e.is_empty() {
                    (Vec::new(), c)
                } else {
                    let mut v = vec![0; offset];
                    v.extend_from_slice(e);
                    (v, c)
                }
            })
            .collect();
        Poly { terms }
    }

    /// Coefficients reduced into `{0, .., p-1}`; zero terms dropped.
    pub fn reduce_mod(&self, p: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, &c)| {
                let r = c.rem_euclid(p as i64);
                (r != 0).then(|| (e.clone(), r))
            })
            .collect();
        Poly { terms }
    }

    /// Evaluates at a point of `ctx^n`. Missing coordinates count as zero.
    pub fn eval(&self, ctx: &FieldCtx, x: &[FqElem]) -> FqElem {
        let mut acc = ctx.zero();
        for (e, &c) in &self.terms {
            let mut term = ctx.from_int(c);
            if term.is_zero() {
                continue;
            }
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let xi = x.get(i).copied().unwrap_or(FqElem::ZERO);
                    term = ctx.mul(&term, &ctx.pow(&xi, k as u64));
                }
            }
            acc = ctx.add(&acc, &term);
        }
        acc
    }

    /// Evaluates over the integers with `f64` arithmetic.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .enumerate()
                    .fold(c as f64, |acc, (i, &k)| acc * x.get(i).copied().unwrap_or(0.0).powi(k as i32))
            })
            .sum()
    }

    pub fn parse(src: &str) -> Result<Poly> {
        if let Some(pos) = src.find('=') {
            let lhs = Parser::new(&src[..pos], 0).parse_all()?;
            let rhs = Parser::new(&src[pos + 1..], pos + 1).parse_all()?;
            return lhs.sub(&rhs);
        }
        Parser::new(src, 0).parse_all()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first reads most naturally.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (e, &c)) in items.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(i, &d)| {
                    if d == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, d)
                    }
                })
                .collect();
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl std::str::FromStr for Poly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Poly::parse(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    lex_err: Option<Error>,
}

impl Parser {
    fn new(src: &str, base: usize) -> Self {
        let mut toks = Vec::new();
        let mut lex_err = None;
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let at = base + i;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    toks.push((at, Tok::Plus));
                    i += 1
                }
                '-' | '\u{2212}' => {
                    toks.push((at, Tok::Minus));
                    i += 1
                }
                '*' => {
                    toks.push((at, Tok::Star));
                    i += 1
                }
                '^' => {
                    toks.push((at, Tok::Caret));
                    i += 1
                }
                '(' => {
                    toks.push((at, Tok::LParen));
                    i += 1
                }
                ')' => {
                    toks.push((at, Tok::RParen));
                    i += 1
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    match src[start..i].parse::<i64>() {
                        Ok(v) => toks.push((at, Tok::Num(v))),
                        Err(_) => {
                            lex_err.get_or_insert(Error::Parse {
                                pos: at,
                                msg: "integer literal too large".into(),
                            });
                        }
                    }
                }
                'a'..='z' | 'A'..='Z' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                        i += 1;
                    }
                    let name = &src[start..i];
                    match var_index(name) {
                        Some(v) => toks.push((at, Tok::Var(v))),
                        None => {
                            lex_err.get_or_insert(Error::Parse {
                                pos: at,
                                msg: format!("unknown variable `{name}` (use x1, x2, ...)"),
                            });
                        }
                    }
                }
                _ => {
                    lex_err.get_or_insert(Error::Parse {
                        pos: at,
                        msg: format!("unexpected character `{c}`"),
                    });
                    i += c.len_utf8();
                }
            }
        }
        Parser {
            toks,
            pos: 0,
            end: base + src.len(),
            lex_err,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn parse_all(mut self) -> Result<Poly> {
        if let Some(e) = self.lex_err.take() {
            return Err(e);
        }
        if self.toks.is_empty() {
            return self.err("empty expression");
        }
        let p = self.expr()?;
        if self.pos != self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?)?;
                }
                Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.power()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(k)) if (0..=64).contains(&k) => {
                    self.pos += 1;
                    base.pow(k as u32)
                }
                _ => self.err("exponent must be an integer in 0..=64"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Poly::constant(v))
            }
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(Poly::var(i))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.err("expected a number, variable or `(`"),
            None => self.err("unexpected end of expression"),
        }
    }
}

fn var_index(name: &str) -> Option<usize> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        "w" => Some(3),
        _ => {
            let rest = name.strip_prefix('x')?;
            let k: usize = rest.parse().ok()?;
            (1..=64).contains(&k).then(|| k - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = Poly::parse("x1*x2 - 1").unwrap();
        assert_eq!(p.to_string(), "x1*x2 - 1");
        let q = Poly::parse("(x + 1)^2").unwrap();
        assert_eq!(q, Poly::parse("x1^2 + 2x1 + 1").unwrap());
        assert_eq!(Poly::parse("y = x^2").unwrap(), Poly::parse("x2 - x1^2").unwrap());
        assert_eq!(Poly::parse("-3").unwrap(), Poly::constant(-3));
        assert_eq!(Poly::parse("2(x-y)").unwrap().to_string(), "2*x1 - 2*x2");
    }

    #[test]
    fn parse_errors_have_positions() {
        match Poly::parse("x1 + * 2") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(Poly::parse("x1 + q").is_err());
        assert!(Poly::parse("(x1").is_err());
        assert!(Poly::parse("").is_err());
    }

    #[test]
    fn derivative_and_homogeneity() {
        let p = Poly::parse("x1^3 + 2x1*x2").unwrap();
        assert_eq!(p.derivative(0), Poly::parse("3x1^2 + 2x2").unwrap());
        assert_eq!(p.derivative(1), Poly::parse("2x1").unwrap());
        assert!(!p.is_homogeneous());
        assert!(Poly::parse("x1*x2 - x3^2").unwrap().is_homogeneous());
    }

    #[test]
    fn eval_over_field() {
        let ctx = FieldCtx::new(3, 1).unwrap();
        let p = Poly::parse("x*y - 1").unwrap();
        let pts: Vec<_> = ctx
            .elements()
            .flat_map(|a| ctx.elements().map(move |b| (a, b)))
            .filter(|(a, b)| p.eval(&ctx, &[*a, *b]).is_zero())
            .collect();
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn shift_and_reduce() {
        let p = Poly::parse("x1 + 5").unwrap();
        assert_eq!(p.shift(2), Poly::parse("x3 + 5").unwrap());
        assert_eq!(p.reduce_mod(3), Poly::parse("x1 + 2").unwrap());
        assert_eq!(Poly::parse("3x").unwrap().reduce_mod(3), Poly::zero());
    }
}
