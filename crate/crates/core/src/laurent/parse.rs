//! Recursive-descent parser for the polynomial expression grammar
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor ("*"? factor)*
//! factor := INT | VAR ("^" SINT)? | "(" expr ")" ("^" INT)?
//! ```
//!
//! A leading unary minus is accepted on any term. With arity one, the single
//! variable may be written under any index (`u3` for `g(u3)`), as long as the
//! same index is used throughout.

use num_bigint::BigInt;

use super::poly::{Exponent, IntLaurentPoly, MAX_ARITY};
use super::LaurentError;

pub fn parse_poly(text: &str, arity: usize) -> Result<IntLaurentPoly, LaurentError> {
    if !(1..=MAX_ARITY).contains(&arity) {
        return Err(LaurentError::BadArity(arity));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, arity, alias: None };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(out)
}

/// Parses and also reports the variable name the input used when `arity == 1`
/// (for example `"u3"`), so callers can format the result back the same way.
pub fn parse_poly_named(text: &str, arity: usize) -> Result<(IntLaurentPoly, Vec<String>), LaurentError> {
    if !(1..=MAX_ARITY).contains(&arity) {
        return Err(LaurentError::BadArity(arity));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, arity, alias: None };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    let names = if arity == 1 {
        vec![format!("u{}", p.alias.unwrap_or(1))]
    } else {
        (1..=arity).map(|i| format!("u{i}")).collect()
    };
    Ok((out, names))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
    alias: Option<usize>,
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> LaurentError {
        LaurentError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<IntLaurentPoly, LaurentError> {
        let mut acc = IntLaurentPoly::zero(self.arity);
        let mut first = true;
        loop {
            let negate = match self.peek() {
                Some(b'+') if !first => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            first = false;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntLaurentPoly, LaurentError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                // implicit multiplication: `2u1`, `u1u2`, `3(1 + u1)`
                Some(c) if c.is_ascii_digit() || c == b'u' || c == b'(' => {
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<IntLaurentPoly, LaurentError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                if matches!(self.src.get(self.pos), Some(b'.') | Some(b'e') | Some(b'E') | Some(b'/')) {
                    return Err(LaurentError::NonIntegerCoefficient { offset: self.pos });
                }
                Ok(IntLaurentPoly::constant(self.arity, n))
            }
            Some(b'u') => {
                let start = self.pos;
                self.pos += 1;
                let index = match self.src.get(self.pos) {
                    Some(d) if d.is_ascii_digit() => (d - b'0') as usize,
                    _ => return Err(self.syntax("expected a digit after 'u'")),
                };
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(d) if d.is_ascii_digit()) {
                    return Err(LaurentError::VariableOutOfRange {
                        index: 10 * index + (self.src[self.pos] - b'0') as usize,
                        offset: start,
                        arity: self.arity,
                    });
                }
                let var = self.resolve_variable(index, start)?;
                let mut e = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    e = self.signed_small()?;
                }
                let mut exp = Exponent::ZERO;
                exp.0[var] = e;
                Ok(IntLaurentPoly::monomial(self.arity, exp, 1))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let at = self.pos;
                    let k = self.signed_small()?;
                    if k < 0 {
                        self.pos = at;
                        return Err(self.syntax("negative power of a parenthesized expression"));
                    }
                    return Ok(inner.pow(k as u32));
                }
                Ok(inner)
            }
            Some(b'.') => Err(LaurentError::NonIntegerCoefficient { offset: self.pos }),
            Some(_) => Err(self.syntax("expected an integer, a variable or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn resolve_variable(&mut self, index: usize, offset: usize) -> Result<usize, LaurentError> {
        let out_of_range = LaurentError::VariableOutOfRange { index, offset, arity: self.arity };
        if index == 0 || index > MAX_ARITY {
            return Err(out_of_range);
        }
        if self.arity == 1 {
            match self.alias {
                None => {
                    self.alias = Some(index);
                    Ok(0)
                }
                Some(a) if a == index => Ok(0),
                Some(_) => Err(out_of_range),
            }
        } else if index <= self.arity {
            Ok(index - 1)
        } else {
            Err(out_of_range)
        }
    }

    fn integer(&mut self) -> Result<BigInt, LaurentError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(d) if d.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }

    fn signed_small(&mut self) -> Result<i64, LaurentError> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let n = self.integer()?;
        let v: i64 = i64::try_from(&n).map_err(|_| LaurentError::Syntax {
            offset: start,
            message: "exponent too large".into(),
        })?;
        if v > 1 << 20 {
            return Err(LaurentError::Syntax { offset: start, message: "exponent too large".into() });
        }
        Ok(if neg { -v } else { v })
    }
}
