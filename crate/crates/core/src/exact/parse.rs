//! Text syntax for polynomials: terms `c * x1^a1 * ... * xn^an` joined by
//! `+`/`-`, coefficients written as integers or `p/q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::poly::{Monomial, TruncatedPoly};
use super::rational::Rational;
use super::ExactError;

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ExactError {
        ExactError::Parse {
            text: self.text.to_string(),
            offset: self.pos,
            message: message.into(),
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if f(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        &self.text[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt, ExactError> {
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error("expected an integer"));
        }
        Ok(digits.parse().expect("ascii digits"))
    }
}

/// Parses `text` as a polynomial in the named variables, truncated at `order`.
pub fn parse_poly(text: &str, vars: &[String], order: u32) -> Result<TruncatedPoly, ExactError> {
    let mut cur = Cursor { text, pos: 0 };
    let mut terms: Vec<(Monomial, Rational)> = Vec::new();
    let mut first = true;
    loop {
        cur.skip_ws();
        let mut sign = Rational::one();
        match cur.peek() {
            None if first => return Err(cur.error("empty polynomial")),
            None => break,
            Some('+') => {
                cur.bump();
            }
            Some('-') => {
                cur.bump();
                sign = -sign;
            }
            Some(_) if !first => return Err(cur.error("expected '+' or '-'")),
            Some(_) => {}
        }
        first = false;
        let (m, c) = parse_term(&mut cur, vars)?;
        terms.push((m, c * sign));
    }
    Ok(TruncatedPoly::from_terms(vars.len(), order, terms))
}

fn parse_term(cur: &mut Cursor<'_>, vars: &[String]) -> Result<(Monomial, Rational), ExactError> {
    let mut coeff = Rational::one();
    let mut mono = Monomial::one(vars.len());
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = cur.integer()?;
                cur.skip_ws();
                let value = if cur.peek() == Some('/') {
                    cur.bump();
                    let den = cur.integer()?;
                    if den == BigInt::from(0) {
                        return Err(cur.error("zero denominator"));
                    }
                    BigRational::new(num, den)
                } else {
                    BigRational::from_integer(num)
                };
                coeff *= value;
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = cur.take_while(|c| c.is_alphanumeric() || c == '_');
                let index = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| cur.error(format!("unknown variable '{name}'")))?;
                cur.skip_ws();
                let exp = if cur.peek() == Some('^') {
                    cur.bump();
                    let e = cur.integer()?;
                    u32::try_from(e).map_err(|_| cur.error("exponent too large"))?
                } else {
                    1
                };
                mono.0[index] += exp;
            }
            _ => return Err(cur.error("expected a coefficient or a variable")),
        }
        cur.skip_ws();
        if cur.peek() == Some('*') {
            cur.bump();
        } else {
            break;
        }
    }
    Ok((mono, coeff))
}
