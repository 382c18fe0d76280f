//! Plain-text grammar for polynomial vector fields and systems.
//!
//! A field is written as its coefficients separated by semicolons:
//!
//! ```text
//! field   := poly ( ';' poly )*
//! poly    := ['+'|'-'] term ( ('+'|'-') term )*
//! term    := factor ( ('*'|'/') factor )*        -- '/' only by a constant
//! factor  := atom ( '^' integer )?
//! atom    := integer | 'x' integer | '(' poly ')'
//! ```
//!
//! Variables are `x1..xn`; rationals are written as quotients (`1/2*x1`).
//! Juxtaposition is not multiplication: write `2*x1`, not `2x1`.
//!
//! A system file holds one field per line plus a `weights:` line giving the
//! dilation exponents. `#` starts a comment.
//!
//! ```text
//! # Grushin plane
//! weights: 1 2
//! 1 ; 0
//! 0 ; x1
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use super::field::VectorField;
use super::polynomial::{Polynomial, Rational};
use super::{DilationWeights, VectorFieldSystem};
use crate::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    line_start_col: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            column: self.line_start_col + self.pos + 1,
            message: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_whitespace() {
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

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn field(&mut self) -> Result<Vec<Polynomial>> {
        let mut coeffs = vec![self.poly()?];
        while self.eat(b';') {
            coeffs.push(self.poly()?);
        }
        if let Some(c) = self.peek() {
            return self.err(format!("unexpected character `{}`", c as char));
        }
        Ok(coeffs)
    }

    fn poly(&mut self) -> Result<Polynomial> {
        let mut acc = if self.eat(b'-') {
            self.term()?.neg()
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat(b'/') {
                let divisor = self.factor()?;
                match divisor.as_constant() {
                    Some(c) if !c.is_zero() => {
                        acc = acc.scale(&(Rational::from_integer(1.into()) / c));
                    }
                    Some(_) => return self.err("division by zero"),
                    None => return self.err("division is only allowed by a constant"),
                }
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.integer()?;
            let e: u32 = match u32::try_from(e) {
                Ok(e) if e <= 64 => e,
                _ => return self.err("exponent must be an integer in 0..=64"),
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.poly()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(p)
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                let k = self.integer()?;
                let k = usize::try_from(k).unwrap_or(0);
                if k == 0 || k > self.nvars {
                    self.pos = at;
                    return self.err(format!("variable index must be in 1..={}, got x{k}", self.nvars));
                }
                Ok(Polynomial::variable(self.nvars, k - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(Polynomial::constant(self.nvars, Rational::from_integer(v)))
            }
            Some(c) => self.err(format!("unexpected character `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn count_components(text: &str) -> usize {
    text.split(';').count()
}

fn parse_field_at(text: &str, line: usize, col0: usize, nvars: Option<usize>) -> Result<VectorField> {
    let nvars = nvars.unwrap_or_else(|| count_components(text));
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        line,
        line_start_col: col0,
        nvars,
    };
    let coeffs = p.field()?;
    if coeffs.len() != nvars {
        return Err(Error::Parse {
            line,
            column: col0 + 1,
            message: format!("expected {nvars} coefficients, found {}", coeffs.len()),
        });
    }
    VectorField::new(coeffs)
}

/// Parse one field; the dimension is the number of `;`-separated parts.
pub fn parse_vector_field(text: &str) -> Result<VectorField> {
    parse_field_at(text, 1, 0, None)
}

/// Parse a whole system file (see module docs).
pub fn parse_system(text: &str) -> Result<VectorFieldSystem> {
    let mut weights: Option<Vec<u32>> = None;
    let mut fields = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if let Some(rest) = trimmed.strip_prefix("weights:") {
            let mut w = Vec::new();
            for tok in rest.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                match tok.parse::<u32>() {
                    Ok(v) => w.push(v),
                    Err(_) => {
                        let col = raw.find(tok).map(|c| c + 1).unwrap_or(1);
                        return Err(Error::Parse {
                            line,
                            column: col,
                            message: format!("weight `{tok}` is not a positive integer"),
                        });
                    }
                }
            }
            weights = Some(w);
            continue;
        }
        let n = *dim.get_or_insert_with(|| count_components(trimmed));
        fields.push(parse_field_at(trimmed, line, lead, Some(n))?);
    }
    let weights = weights.ok_or_else(|| Error::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing `weights:` line".into(),
    })?;
    VectorFieldSystem::new(fields, DilationWeights::new(weights)?)
}

#[cfg(test)]
mod tests {
    use super::super::polynomial::ratio;
    use super::*;

    #[test]
    fn grushin_field() {
        let f = parse_vector_field("0 ; x1^2").unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.coeff(1), &Polynomial::variable(2, 0).pow(2));
    }

    #[test]
    fn rational_and_parentheses() {
        let f = parse_vector_field("1 ; -1/2*x1 ; (x1 + x2)^2 - x1^2").unwrap();
        assert_eq!(f.coeff(1), &Polynomial::variable(3, 0).scale(&ratio(-1, 2)));
        let x1 = Polynomial::variable(3, 0);
        let x2 = Polynomial::variable(3, 1);
        let expect = x1.mul(&x2).scale(&ratio(2, 1)).add(&x2.pow(2));
        assert_eq!(f.coeff(2), &expect);
    }

    #[test]
    fn error_positions() {
        match parse_vector_field("1 ; x3") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_vector_field("1 ; 2 $") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 7),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_vector_field("x1 / x1 ; 0").is_err());
    }

    #[test]
    fn system_file() {
        let text = "# Grushin\nweights: 1 2\n1 ; 0\n0 ; x1   # degenerate on x1 = 0\n";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.fields().len(), 2);
        assert_eq!(sys.weights().sigma(), &[1, 2]);
    }

    #[test]
    fn system_file_error_line() {
        let text = "weights: 1 2\n1 ; 0\n0 ; x1 +\n";
        match parse_system(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
