//! A small infix reader for polynomials such as `x^2 + y^2 - 1` or `2*x + 2*y*z1`.
//!
//! Grammar: sums of products of powers; atoms are integers, `a/b` literals,
//! parenthesized expressions and the variables `x`, `y`, `z1`, `z2`, … (also
//! written `z_1`).

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::poly::MultiPoly;

pub fn parse_poly(field: FieldSpec, num_vars: usize, src: &str) -> Result<MultiPoly> {
    let mut p = Parser {
        s: src.as_bytes(),
        pos: 0,
        field,
        num_vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    field: FieldSpec,
    num_vars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in polynomial", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                // implicit product such as `2x` or `x y`
                Some(c) if c.is_ascii_alphabetic() || c == b'(' => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.digits().ok_or_else(|| self.err("expected exponent"))?;
            let e: u32 = e.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits().unwrap();
                let lit = if self.s.get(self.pos) == Some(&b'/')
                    && self.s.get(self.pos + 1).is_some_and(u8::is_ascii_digit)
                {
                    self.pos += 1;
                    format!("{num}/{}", self.digits().unwrap())
                } else {
                    num
                };
                let c = Scalar::parse(self.field, &lit)?;
                Ok(MultiPoly::constant(self.field, self.num_vars, c))
            }
            Some(b'x') => {
                self.pos += 1;
                self.variable(0)
            }
            Some(b'y') => {
                self.pos += 1;
                self.variable(1)
            }
            Some(b'z') => {
                self.pos += 1;
                if self.s.get(self.pos) == Some(&b'_') {
                    self.pos += 1;
                }
                let idx = self.digits().ok_or_else(|| self.err("expected jet index after z"))?;
                let j: usize = idx.parse().map_err(|_| self.err("bad jet index"))?;
                if j == 0 {
                    return Err(self.err("jet variables start at z1"));
                }
                self.variable(j + 1)
            }
            _ => Err(self.err("unexpected token")),
        }
    }

    fn variable(&self, idx: usize) -> Result<MultiPoly> {
        if idx >= self.num_vars {
            return Err(self.err("variable outside the declared variable set"));
        }
        Ok(MultiPoly::var(self.field, self.num_vars, idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips() {
        let q = FieldSpec::rationals();
        for src in ["x^2 + y^2 - 1", "2*x + 2*y*z1", "-3/4*x*z2^2 + z1 - 7", "0"] {
            let p = parse_poly(q, 4, src).unwrap();
            let again = parse_poly(q, 4, &p.to_string()).unwrap();
            assert_eq!(p, again, "{src}");
        }
    }

    #[test]
    fn rejects_out_of_range_variables() {
        let q = FieldSpec::rationals();
        assert!(parse_poly(q, 2, "z1").is_err());
        assert!(parse_poly(q, 3, "z_1 + x").is_ok());
        assert!(parse_poly(q, 2, "x +").is_err());
    }

    #[test]
    fn implicit_products() {
        let q = FieldSpec::rationals();
        assert_eq!(parse_poly(q, 2, "2x y").unwrap(), parse_poly(q, 2, "2*x*y").unwrap());
    }
}
