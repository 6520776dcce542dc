//! Text form of elements.
//!
//! ```text
//! element  := ['+'|'-'] term (('+'|'-') term)*
//! term     := coeff ['*'] 't' ['^' exp] | 't' ['^' exp] | coeff
//! coeff    := digits ['/' digits]
//! exp      := ['-'] digits ['/' digits] | '(' rational ')'     d = 1
//!           | '(' rational ',' rational ')'                     d = 2
//! ```
//!
//! Whitespace is ignored between tokens. A bare `t` is `t^1` in `d = 1` and
//! `t^(1,0)` in `d = 2`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::series::{Element, Exponent, ModelError, Series, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, expected: expected.into() })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("ascii digits parse"))
    }

    fn unsigned_rational(&mut self) -> Result<BigRational, ParseError> {
        let num = self.digits()?;
        if self.eat(b'/') {
            let at = self.pos;
            let den = self.digits()?;
            if den.is_zero() {
                return Err(ParseError { position: at, expected: "nonzero denominator".into() });
            }
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(num))
    }

    fn signed_rational(&mut self) -> Result<BigRational, ParseError> {
        let neg = self.eat(b'-');
        let r = self.unsigned_rational()?;
        Ok(if neg { -r } else { r })
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        if self.dim == 1 {
            if self.eat(b'(') {
                let r = self.signed_rational()?;
                self.expect(b')', "')'")?;
                return Ok(Exponent::new(vec![r]));
            }
            return Ok(Exponent::new(vec![self.signed_rational()?]));
        }
        if !self.eat(b'(') {
            return self.fail(&format!("'(' opening a {}-component exponent", self.dim));
        }
        let mut comps = vec![self.signed_rational()?];
        for _ in 1..self.dim {
            self.expect(b',', "','")?;
            comps.push(self.signed_rational()?);
        }
        self.expect(b')', "')'")?;
        Ok(Exponent::new(comps))
    }

    fn t_tail(&mut self, coeff: BigRational) -> Result<Term, ParseError> {
        self.expect(b't', "'t'")?;
        let exponent = if self.eat(b'^') { self.exponent()? } else { Exponent::unit(self.dim, 0) };
        Ok(Term { exponent, coeff })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let coeff = self.unsigned_rational()?;
                if self.eat(b'*') || self.peek() == Some(b't') {
                    self.t_tail(coeff)
                } else {
                    Ok(Term { exponent: Exponent::zero(self.dim), coeff })
                }
            }
            Some(b't') => self.t_tail(BigRational::one()),
            _ => self.fail("a coefficient or 't'"),
        }
    }

    fn series(&mut self) -> Result<Series, ParseError> {
        let mut terms = Vec::new();
        let mut neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        loop {
            let mut term = self.term()?;
            if neg {
                term.coeff = -term.coeff;
            }
            terms.push(term);
            match self.peek() {
                None => break,
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                Some(_) => return self.fail("'+', '-' or end of input"),
            }
            self.pos += 1;
        }
        Ok(Series::from_terms(self.dim, terms))
    }
}

/// Parses a signed series; no model invariants are checked.
pub fn parse_series(text: &str, dim: usize) -> Result<Series, ParseError> {
    if !(1..=2).contains(&dim) {
        return Err(ParseError { position: 0, expected: "dimension 1 or 2".into() });
    }
    Parser { src: text.as_bytes(), pos: 0, dim }.series()
}

pub fn parse_element(text: &str, dim: usize) -> Result<Element, TextError> {
    Ok(Element::try_new(parse_series(text, dim)?)?)
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Exponent) -> fmt::Result {
    let comps = e.components();
    if let [x] = comps {
        if x.is_one() {
            return Ok(());
        }
        if x.is_integer() && !x.is_negative() {
            return write!(f, "^{x}");
        }
        return write!(f, "^({x})");
    }
    write!(f, "^(")?;
    for (i, c) in comps.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, ")")
}

/// Display adapter producing the canonical text of a series.
pub struct SeriesText<'a>(pub &'a Series);

impl fmt::Display for SeriesText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.0.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in terms.iter().enumerate() {
            let neg = term.coeff.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = term.coeff.abs();
            if term.exponent.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            if !c.is_one() {
                write!(f, "{c}*")?;
            }
            write!(f, "t")?;
            write_exponent(f, &term.exponent)?;
        }
        Ok(())
    }
}

pub fn format_series(s: &Series) -> String {
    SeriesText(s).to_string()
}

pub fn format_element(e: &Element) -> String {
    format_series(e.series())
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        SeriesText(self.series()).fmt(f)
    }
}

/// The dimension implied by the exponent syntax: 2 when a parenthesized
/// exponent contains a comma.
pub fn infer_dim(text: &str) -> usize {
    let mut depth = 0;
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth > 0 => return 2,
            _ => {}
        }
    }
    1
}
