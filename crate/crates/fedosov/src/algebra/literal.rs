//! Plain-text literals for polynomials and series.
//!
//! Grammar: sums and products of numbers, coordinates (`x1..xn`, `y1..yn`,
//! or `x`, `y` when `n = 1`), the reserved symbol `t`, and the imaginary unit
//! `i`; `^` raises to a non-negative integer power and `/` divides by a
//! nonzero constant. Example: `y + t*x^2*y`.

use super::poly::{ChartPoly, Mono};
use super::scalar::Scalar;
use super::series::TSeries;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("literal `{text}`, column {column}: {message}")]
pub struct LiteralError {
    pub text: String,
    pub column: usize,
    pub message: String,
}

/// Polynomial in the chart coordinates and `t`, keyed by `(t power, exponents)`.
#[derive(Clone, Debug)]
struct Expr {
    terms: BTreeMap<(u32, Mono), Scalar>,
}

impl Expr {
    fn constant(n: usize, c: Scalar) -> Expr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, vec![0; 2 * n]), c);
        }
        Expr { terms }
    }

    fn add(mut self, o: &Expr, sign: i64) -> Expr {
        let s = Scalar::from_int(sign);
        for (k, v) in &o.terms {
            let e = self.terms.entry(k.clone()).or_insert_with(Scalar::zero);
            *e += &(v * &s);
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
        self
    }

    fn mul(&self, o: &Expr) -> Expr {
        let mut out = Expr {
            terms: BTreeMap::new(),
        };
        for ((ta, ea), ca) in &self.terms {
            for ((tb, eb), cb) in &o.terms {
                let e: Mono = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let key = (ta + tb, e);
                let v = out.terms.entry(key.clone()).or_insert_with(Scalar::zero);
                *v += &(ca * cb);
                if v.is_zero() {
                    out.terms.remove(&key);
                }
            }
        }
        out
    }

    /// The value when the expression is a constant.
    fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let ((tp, e), v) = self.terms.iter().next().unwrap();
                if *tp == 0 && e.iter().all(|&k| k == 0) {
                    Some(v.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<char>,
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, LiteralError> {
        Err(LiteralError {
            text: self.text.to_string(),
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, LiteralError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let r = self.term()?;
                    acc = acc.add(&r, 1);
                }
                Some('-') => {
                    self.pos += 1;
                    let r = self.term()?;
                    acc = acc.add(&r, -1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, LiteralError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let r = self.unary()?;
                    acc = acc.mul(&r);
                }
                Some('/') => {
                    self.pos += 1;
                    let start = self.pos;
                    let r = self.unary()?;
                    let c = match r.as_constant() {
                        Some(c) => c,
                        None => {
                            self.pos = start;
                            return self.err("division is only allowed by constants");
                        }
                    };
                    let inv = match c.inv() {
                        Some(v) => v,
                        None => {
                            self.pos = start;
                            return self.err("division by zero");
                        }
                    };
                    acc = acc.mul(&Expr::constant(self.n, inv));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, LiteralError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                let e = self.unary()?;
                Ok(Expr::constant(self.n, Scalar::zero()).add(&e, -1))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, LiteralError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected a non-negative integer exponent");
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            let k: u32 = match s.parse() {
                Ok(k) => k,
                Err(_) => return self.err("exponent too large"),
            };
            let mut acc = Expr::constant(self.n, Scalar::one());
            for _ in 0..k {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, LiteralError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let v: num_bigint::BigInt = s.parse().expect("digits");
                Ok(Expr::constant(
                    self.n,
                    Scalar::from_rational(num_rational::BigRational::from_integer(v)),
                ))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let n = self.n;
                let mut terms = BTreeMap::new();
                match name.as_str() {
                    "t" => {
                        terms.insert((1, vec![0; 2 * n]), Scalar::one());
                    }
                    "i" => {
                        terms.insert((0, vec![0; 2 * n]), Scalar::i());
                    }
                    _ => match coord_index(&name, n) {
                        Some(idx) => {
                            let mut e = vec![0; 2 * n];
                            e[idx] = 1;
                            terms.insert((0, e), Scalar::one());
                        }
                        None => {
                            self.pos = start;
                            return self.err(format!("unknown identifier `{}`", name));
                        }
                    },
                }
                Ok(Expr { terms })
            }
            Some(c) => self.err(format!("unexpected character `{}`", c)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Index of a coordinate name on a chart of half-dimension `n`.
pub fn coord_index(name: &str, n: usize) -> Option<usize> {
    if n == 1 {
        match name {
            "x" => return Some(0),
            "y" => return Some(1),
            _ => {}
        }
    }
    let (block, rest) = name.split_at(1);
    let k: usize = rest.parse().ok()?;
    if k == 0 || k > n || rest.starts_with('0') {
        return None;
    }
    match block {
        "x" => Some(k - 1),
        "y" => Some(n + k - 1),
        _ => None,
    }
}

fn parse_expr(text: &str, n: usize) -> Result<Expr, LiteralError> {
    let mut p = Parser {
        text,
        chars: text.chars().collect(),
        pos: 0,
        n,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses a series literal, truncating powers of `t` above `order`.
pub fn parse_series(text: &str, n: usize, order: usize) -> Result<TSeries, LiteralError> {
    let e = parse_expr(text, n)?;
    let mut cs = vec![ChartPoly::zero(n); order + 1];
    for ((tp, m), v) in e.terms {
        if (tp as usize) <= order {
            cs[tp as usize].add_term(m, &v);
        }
    }
    Ok(TSeries::from_coeffs(n, order, cs))
}

/// Parses a polynomial literal; `t` is rejected.
pub fn parse_poly(text: &str, n: usize) -> Result<ChartPoly, LiteralError> {
    let e = parse_expr(text, n)?;
    let mut p = ChartPoly::zero(n);
    for ((tp, m), v) in e.terms {
        if tp != 0 {
            return Err(LiteralError {
                text: text.to_string(),
                column: 1,
                message: "`t` is not allowed in a polynomial literal".into(),
            });
        }
        p.add_term(m, &v);
    }
    Ok(p)
}

/// Parses a scalar literal such as `-3/2` or `1/2+i`.
pub fn parse_scalar(text: &str) -> Result<Scalar, LiteralError> {
    let e = parse_expr(text, 0)?;
    e.as_constant().ok_or(LiteralError {
        text: text.to_string(),
        column: 1,
        message: "expected a constant".into(),
    })
}

/// Terms of a polynomial as `(monomial text, coefficient)` in canonical order.
pub fn split_poly_terms(p: &ChartPoly) -> Vec<(String, Scalar)> {
    let n = p.n();
    let mut v: Vec<(&Mono, &Scalar)> = p.terms().collect();
    v.reverse();
    v.into_iter()
        .map(|(e, c)| {
            let mut parts = Vec::new();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let name = super::poly::coord_name(n, i);
                parts.push(if k == 1 {
                    name
                } else {
                    format!("{}^{}", name, k)
                });
            }
            (parts.join("*"), c.clone())
        })
        .collect()
}

/// Joins `(monomial, coefficient)` pairs into canonical literal text.
pub fn format_terms(items: impl Iterator<Item = (String, Scalar)>) -> String {
    let mut out = String::new();
    for (mono, c) in items {
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative_literal();
        let mag = if negative { -&c } else { c.clone() };
        let body = if mono.is_empty() {
            if mag.is_compound() {
                format!("({})", mag)
            } else {
                mag.to_string()
            }
        } else if mag.is_one() {
            mono
        } else if mag.is_compound() {
            format!("({})*{}", mag, mono)
        } else {
            format!("{}*{}", mag, mono)
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}
