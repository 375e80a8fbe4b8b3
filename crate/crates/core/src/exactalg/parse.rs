//! Text formats: rational literals, polynomial strings and JSON jets.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::Value;

use super::jet::Jet;
use super::mpoly::MPoly;
use super::scalar::Rat;
use crate::error::{Error, Result};

/// Parse `"p"`, `"p/q"` or a finite decimal such as `"-0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, frac);
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rat::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let r = Rat::from_str(s).map_err(|_| bad())?;
    Ok(r)
}

pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

/// A rational given as a JSON string or an integer/decimal number.
pub fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => parse_rat(&n.to_string()),
        other => Err(Error::Parse(format!("expected a rational, found {other}"))),
    }
}

pub fn rats_from_json(v: &Value) -> Result<Vec<Rat>> {
    match v {
        Value::Array(items) => items.iter().map(rat_from_json).collect(),
        other => Err(Error::Parse(format!("expected an array of rationals, found {other}"))),
    }
}

/// Parse a JSON array text such as `[10, "9/4"]`.
pub fn parse_rat_list(text: &str) -> Result<Vec<Rat>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
    rats_from_json(&v)
}

pub fn rats_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(rat_to_string(r))).collect())
}

/// A jet is the array of its Taylor coefficients; the order is the array length minus one.
pub fn jet_from_json(v: &Value) -> Result<Jet<Rat>> {
    let coeffs = rats_from_json(v)?;
    if coeffs.is_empty() {
        return Err(Error::Parse("a jet needs at least one coefficient".into()));
    }
    let order = coeffs.len() - 1;
    Ok(Jet::new(coeffs, order))
}

pub fn jet_to_json(j: &Jet<Rat>) -> Value {
    rats_to_json(j.coeffs())
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(BigInt::from_str(&text).expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in polynomial")));
        }
    }
    Ok(out)
}

struct PolyParser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [String],
}

impl PolyParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                match self.peek().cloned() {
                    Some(Tok::Num(d)) if d != BigInt::from(0) => {
                        self.pos += 1;
                        acc = acc.scale(&Rat::new(1.into(), d));
                    }
                    _ => return Err(Error::Parse("division only by nonzero integer constants".into())),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = match self.peek().cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    u32::try_from(e).map_err(|_| Error::Parse("exponent too large".into()))?
                }
                _ => return Err(Error::Parse("exponent must be a non-negative integer".into())),
            };
            let mut acc = MPoly::constant(self.nvars(), Rat::from_integer(1.into()));
            for _ in 0..e {
                acc = &acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MPoly::constant(self.nvars(), Rat::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .names
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(MPoly::var(self.nvars(), i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse a polynomial such as `"3/2*y1^2*y2 - x"` over the named variables.
pub fn parse_poly(text: &str, names: &[String]) -> Result<MPoly> {
    let mut p = PolyParser { toks: tokenize(text)?, pos: 0, names };
    if p.toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in polynomial {text:?}")));
    }
    Ok(e)
}
