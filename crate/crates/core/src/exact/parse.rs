//! Parser for exact scalar literals.
//!
//! Accepts sums, products and quotients of integers and `sqrt(r)` (or `√r`)
//! with rational `r`, e.g. `-1/4`, `(1/2 + 3/2*sqrt(5))`, `−1/4+√5/4`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{QuadSurd, Rational};
use crate::error::{Error, Result};

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

fn normalize(c: char) -> char {
    match c {
        '−' | '–' => '-',
        '·' | '×' => '*',
        other => other,
    }
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let chars = src.char_indices().map(|(i, c)| (i, normalize(c))).collect();
        Self { chars, pos: 0, src }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |&(i, _)| i)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.offset(), message: message.into() })
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<QuadSurd> {
        let mut acc = if self.eat('-') {
            -self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.combine(acc.checked_add(&t))?;
            } else if self.eat('-') {
                let t = self.term()?;
                acc = self.combine(acc.checked_sub(&t))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn combine(&self, r: Result<QuadSurd>) -> Result<QuadSurd> {
        r.or_else(|e| self.err(e.to_string()))
    }

    fn term(&mut self) -> Result<QuadSurd> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let f = self.factor()?;
                acc = self.combine(acc.checked_mul(&f))?;
            } else if self.eat('/') {
                let f = self.factor()?;
                if f.is_zero() {
                    return self.err("division by zero");
                }
                acc = self.combine(acc.checked_div(&f))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<QuadSurd> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(v)
            }
            Some('-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some('√') => {
                self.pos += 1;
                let arg = self.factor()?;
                self.sqrt(arg)
            }
            Some('s') => {
                for expected in "sqrt".chars() {
                    if self.chars.get(self.pos).map(|&(_, c)| c) != Some(expected) {
                        return self.err("expected 'sqrt'");
                    }
                    self.pos += 1;
                }
                if self.peek() != Some('(') {
                    return self.err("expected '(' after sqrt");
                }
                let arg = self.factor()?;
                self.sqrt(arg)
            }
            Some(c) if c.is_ascii_digit() => self.integer(),
            Some(c) => self.err(format!("unexpected character '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }

    fn sqrt(&self, arg: QuadSurd) -> Result<QuadSurd> {
        match arg.to_rational() {
            Some(r) => QuadSurd::sqrt_of(&r).or_else(|e| self.err(e.to_string())),
            None => self.err("sqrt argument must be rational"),
        }
    }

    fn integer(&mut self) -> Result<QuadSurd> {
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if matches!(self.chars.get(self.pos), Some((_, '.' | 'e' | 'E'))) {
            return self.err("decimal literals are not exact; write p/q");
        }
        let digits: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        let n: BigInt = digits.parse().expect("ascii digits");
        Ok(QuadSurd::from_rational(Rational::from_integer(n)))
    }
}

/// Parses an exact scalar literal.
pub fn parse_surd(src: &str) -> Result<QuadSurd> {
    let mut p = Parser::new(src);
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses a literal that must be rational.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let v = parse_surd(src)?;
    v.to_rational().ok_or_else(|| Error::Parse { offset: 0, message: format!("{src} is not rational") })
}
