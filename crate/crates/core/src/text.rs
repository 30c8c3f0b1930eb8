//! Text grammar shared by monomials, sl2 monomials and polynomials.
//!
//! ```text
//! poly   := term (("+" | "-") term)*
//! term   := ["-"] [integer "*"] mono
//! mono   := "1" | factor (" " factor)*
//! factor := node "_" int ("^" int)?        node ∈ {1, 2}
//! int    := ["-"] digits | "{" ["-"] digits "}"
//! ```
//!
//! sl2 monomials use the same grammar with `Y` in place of the node.

use crate::coeff::Int;
use crate::error::{Error, Result};
use crate::monomial::{Monomial, Node};
use crate::sl2::Sl2Monomial;
use crate::zp_ring::QPolynomial;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::syntax(self.pos, msg)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn signed_i32(&mut self) -> Result<i32> {
        let braced = self.eat('{');
        let start = self.pos;
        self.eat('-');
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected integer"));
        }
        let text = &self.src[start..self.pos];
        let value = text.parse::<i32>().map_err(|_| Error::syntax(start, format!("integer {text} out of range")))?;
        if braced {
            self.expect('}')?;
        }
        Ok(value)
    }

    /// `node "_" int ("^" int)?` with the node token parsed by `node`.
    fn factor<N>(&mut self, node: impl FnOnce(&mut Self) -> Result<N>) -> Result<(N, i32, i32)> {
        let n = node(self)?;
        self.expect('_')?;
        let at = self.pos;
        let shift = self.signed_i32()?;
        if shift.unsigned_abs() > MAX_SHIFT {
            return Err(Error::syntax(at, format!("shift {shift} out of range")));
        }
        let exp = if self.eat('^') { self.signed_i32()? } else { 1 };
        Ok((n, shift, exp))
    }

    /// Parses factors until something that cannot start a factor.
    fn factors<N>(&mut self, mut node: impl FnMut(&mut Self) -> Result<N>, starts: impl Fn(char) -> bool) -> Result<Vec<(N, i32, i32)>> {
        self.skip_ws();
        let mut out = Vec::new();
        // identity: a lone "1" not followed by "_"
        if self.peek() == Some('1') && !self.src[self.pos + 1..].starts_with('_') {
            let save = self.pos;
            self.bump();
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Ok(out);
            }
            self.pos = save;
        }
        loop {
            out.push(self.factor(&mut node)?);
            let save = self.pos;
            self.skip_ws();
            match self.peek() {
                Some(c) if starts(c) => continue,
                _ => {
                    self.pos = save;
                    return Ok(out);
                }
            }
        }
    }

    fn monomial(&mut self) -> Result<Monomial> {
        let node = |cur: &mut Self| {
            let start = cur.pos;
            let digits = cur.digits();
            match digits {
                "1" => Ok(Node::One),
                "2" => Ok(Node::Two),
                "" => Err(Error::syntax(start, "expected node")),
                other => Err(Error::syntax(start, format!("unknown node {other}"))),
            }
        };
        let triples = self.factors(node, |c| c.is_ascii_digit())?;
        Monomial::from_triples(triples)
    }

    fn sl2_monomial(&mut self) -> Result<Sl2Monomial> {
        let node = |cur: &mut Self| if cur.eat('Y') { Ok(()) } else { Err(cur.error("expected 'Y'")) };
        let pairs = self.factors(node, |c| c == 'Y')?;
        Sl2Monomial::from_pairs(pairs.into_iter().map(|((), s, e)| (s, e)))
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn polynomial(&mut self) -> Result<QPolynomial> {
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            self.skip_ws();
            let mut negative = false;
            if !first {
                if self.eat('-') {
                    negative = true;
                } else if !self.eat('+') {
                    return Err(self.error("expected '+' or '-'"));
                }
                self.skip_ws();
            }
            if first {
                if self.at_end() {
                    return Err(self.error("empty polynomial"));
                }
                negative = self.eat('-');
                self.skip_ws();
            }
            let coeff = self.coefficient()?;
            let mono = self.monomial()?;
            terms.push((mono, if negative { -coeff } else { coeff }));
            first = false;
            self.skip_ws();
            if self.at_end() {
                break;
            }
        }
        Ok(QPolynomial::from_terms(terms))
    }

    /// Optional `digits "*"`; rewinds if the digits belong to a monomial.
    fn coefficient(&mut self) -> Result<Int> {
        let save = self.pos;
        let digits = self.digits();
        if !digits.is_empty() {
            self.skip_ws();
            if self.eat('*') {
                self.skip_ws();
                return digits.parse::<Int>().map_err(|_| Error::syntax(save, "bad coefficient"));
            }
        }
        self.pos = save;
        Ok(Int::ONE)
    }
}

/// Largest accepted spectral shift, far beyond anything the algorithms
/// reach and small enough that shift arithmetic cannot overflow.
pub const MAX_SHIFT: u32 = 1_000_000;

pub fn parse_monomial(src: &str) -> Result<Monomial> {
    let mut cur = Cursor::new(src);
    cur.skip_ws();
    if cur.at_end() {
        return Err(cur.error("empty monomial"));
    }
    let m = cur.monomial()?;
    cur.finish()?;
    Ok(m)
}

pub fn parse_sl2_monomial(src: &str) -> Result<Sl2Monomial> {
    let mut cur = Cursor::new(src);
    cur.skip_ws();
    if cur.at_end() {
        return Err(cur.error("empty monomial"));
    }
    let m = cur.sl2_monomial()?;
    cur.finish()?;
    Ok(m)
}

pub fn parse_polynomial(src: &str) -> Result<QPolynomial> {
    if src.trim() == "0" {
        return Ok(QPolynomial::zero());
    }
    let mut cur = Cursor::new(src);
    let p = cur.polynomial()?;
    cur.finish()?;
    Ok(p)
}
