//! Potential expressions: a small AST and its recursive-descent parser.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := number | 'q' | '(' expr ')' | func '(' expr ')'
//! func   := 'exp' | 'cosh' | 'cos'
//! ```
//!
//! Unary minus binds looser than `^`, so `-q^2` reads as `-(q^2)`.

use std::fmt;

use super::jet::Jet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Cosh,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "exp" => Some(Func::Exp),
            "cosh" => Some(Func::Cosh),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Cosh => "cosh",
            Func::Cos => "cos",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialExpr {
    Const(f64),
    Var,
    Add(Box<PotentialExpr>, Box<PotentialExpr>),
    Sub(Box<PotentialExpr>, Box<PotentialExpr>),
    Mul(Box<PotentialExpr>, Box<PotentialExpr>),
    Div(Box<PotentialExpr>, Box<PotentialExpr>),
    Pow(Box<PotentialExpr>, i32),
    Neg(Box<PotentialExpr>),
    Call(Func, Box<PotentialExpr>),
    /// Polynomial in q with coefficients `c0, c1, ..., cn`.
    Poly(Vec<f64>),
}

impl PotentialExpr {
    pub fn parse(text: &str) -> Result<Self> {
        parse_potential(text)
    }

    /// Polynomial `c0 + c1 q + ... + cn q^n`.
    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        PotentialExpr::Poly(coefficients)
    }

    /// `factor * self`.
    pub fn scaled(&self, factor: f64) -> Self {
        PotentialExpr::Mul(
            Box::new(PotentialExpr::Const(factor)),
            Box::new(self.clone()),
        )
    }

    pub fn eval(&self, q: f64) -> f64 {
        match self {
            PotentialExpr::Const(c) => *c,
            PotentialExpr::Var => q,
            PotentialExpr::Add(l, r) => l.eval(q) + r.eval(q),
            PotentialExpr::Sub(l, r) => l.eval(q) - r.eval(q),
            PotentialExpr::Mul(l, r) => l.eval(q) * r.eval(q),
            PotentialExpr::Div(l, r) => l.eval(q) / r.eval(q),
            PotentialExpr::Pow(b, n) => b.eval(q).powi(*n),
            PotentialExpr::Neg(e) => -e.eval(q),
            PotentialExpr::Call(f, e) => {
                let x = e.eval(q);
                match f {
                    Func::Exp => x.exp(),
                    Func::Cosh => x.cosh(),
                    Func::Cos => x.cos(),
                }
            }
            PotentialExpr::Poly(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * q + ci),
        }
    }

    /// Value and first two derivatives by forward-mode evaluation, without finiteness checks.
    pub fn jet(&self, q: Jet) -> Jet {
        match self {
            PotentialExpr::Const(c) => Jet::constant(*c),
            PotentialExpr::Var => q,
            PotentialExpr::Add(l, r) => l.jet(q) + r.jet(q),
            PotentialExpr::Sub(l, r) => l.jet(q) - r.jet(q),
            PotentialExpr::Mul(l, r) => l.jet(q) * r.jet(q),
            PotentialExpr::Div(l, r) => l.jet(q) / r.jet(q),
            PotentialExpr::Pow(b, n) => b.jet(q).powi(*n),
            PotentialExpr::Neg(e) => -e.jet(q),
            PotentialExpr::Call(f, e) => {
                let x = e.jet(q);
                match f {
                    Func::Exp => x.exp(),
                    Func::Cosh => x.cosh(),
                    Func::Cos => x.cos(),
                }
            }
            PotentialExpr::Poly(c) => c
                .iter()
                .rev()
                .fold(Jet::constant(0.0), |acc, &ci| acc * q + Jet::constant(ci)),
        }
    }
}

/// Returns `(V, V', V'')` at `q`.
pub fn eval_with_derivatives(expr: &PotentialExpr, q: f64) -> Result<(f64, f64, f64)> {
    let j = expr.jet(Jet::variable(q));
    if !j.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite value or derivative at q = {q}: ({}, {}, {})",
            j.value, j.d1, j.d2
        )));
    }
    Ok((j.value, j.d1, j.d2))
}

impl fmt::Display for PotentialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialExpr::Const(c) => write!(f, "{c}"),
            PotentialExpr::Var => write!(f, "q"),
            PotentialExpr::Add(l, r) => write!(f, "({l} + {r})"),
            PotentialExpr::Sub(l, r) => write!(f, "({l} - {r})"),
            PotentialExpr::Mul(l, r) => write!(f, "({l} * {r})"),
            PotentialExpr::Div(l, r) => write!(f, "({l} / {r})"),
            PotentialExpr::Pow(b, n) => write!(f, "{b}^{n}"),
            PotentialExpr::Neg(e) => write!(f, "(-{e})"),
            PotentialExpr::Call(func, e) => write!(f, "{}({e})", func.name()),
            PotentialExpr::Poly(c) => {
                write!(f, "(")?;
                for (i, ci) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{ci}*q^{i}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn parse_potential(text: &str) -> Result<PotentialExpr> {
    let mut parser = Parser { src: text, pos: 0 };
    parser.skip_ws();
    if parser.at_end() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let expr = parser.expr()?;
    parser.skip_ws();
    if !parser.at_end() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn syntax(&self, message: &str) -> Error {
        let found = match self.peek() {
            Some(c) => format!("{message} (found `{c}`)"),
            None => format!("{message} (found end of input)"),
        };
        Error::Syntax {
            offset: self.pos,
            message: found,
        }
    }

    fn expr(&mut self) -> Result<PotentialExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                lhs = PotentialExpr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat('-') {
                let rhs = self.term()?;
                lhs = PotentialExpr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<PotentialExpr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                let rhs = self.factor()?;
                lhs = PotentialExpr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat('/') {
                let rhs = self.factor()?;
                lhs = PotentialExpr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<PotentialExpr> {
        if self.eat('-') {
            return Ok(PotentialExpr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let n = self.integer_exponent()?;
            return Ok(PotentialExpr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn integer_exponent(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.peek() == Some('-');
        if negative {
            self.pos += 1;
        }
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            return Err(self.syntax("expected integer exponent"));
        }
        let number_start = self.pos;
        let text = self.scan_number()?;
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: number_start,
            message: format!("malformed number `{text}`"),
        })?;
        if value.fract() != 0.0 || value.abs() > f64::from(i32::MAX) {
            return Err(Error::NonIntegerExponent {
                text: self.src[start..self.pos].to_string(),
                offset: start,
            });
        }
        let n = value as i32;
        Ok(if negative { -n } else { n })
    }

    /// Scans `digits [. digits] [(e|E) [+-] digits]` starting at the cursor.
    fn scan_number(&mut self) -> Result<&str> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut mantissa = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            mantissa += digits(&mut i);
        }
        if mantissa == 0 {
            self.pos = start;
            return Err(self.syntax("expected number"));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) == 0 {
                self.pos = j;
                return Err(self.syntax("expected exponent digits"));
            }
            i = j;
        }
        self.pos = i;
        Ok(&self.src[start..i])
    }

    fn atom(&mut self) -> Result<PotentialExpr> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                let text = self.scan_number()?;
                text.parse()
                    .map(PotentialExpr::Const)
                    .map_err(|_| Error::Syntax {
                        offset: start,
                        message: format!("malformed number `{text}`"),
                    })
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                self.skip_ws();
                if self.peek() == Some('(') {
                    let func = Func::from_name(name).ok_or_else(|| Error::UnknownFunction {
                        name: name.to_string(),
                        offset: start,
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.syntax("expected `)`"));
                    }
                    Ok(PotentialExpr::Call(func, Box::new(arg)))
                } else if name == "q" {
                    Ok(PotentialExpr::Var)
                } else {
                    Err(Error::Syntax {
                        offset: start,
                        message: format!("unknown identifier `{name}` (the variable is `q`)"),
                    })
                }
            }
            _ => Err(self.syntax("expected number, `q`, `(` or function call")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(text: &str, q: f64) -> f64 {
        parse_potential(text).unwrap().eval(q)
    }

    #[test]
    fn quartic_at_origin() {
        assert_eq!(value("(q^2 - 1)^2", 0.0), 1.0);
    }

    #[test]
    fn product_vanishes_at_double_root() {
        assert_eq!(value("(q^2-1)^2*(1+q^2/2)", 1.0), 0.0);
    }

    #[test]
    fn doubled_caret_is_syntax_error_at_offset_two() {
        match parse_potential("q^^2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_function() {
        match parse_potential("1 + sin(q)") {
            Err(Error::UnknownFunction { name, offset }) => {
                assert_eq!(name, "sin");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_integer_exponent() {
        assert!(matches!(
            parse_potential("q^2.5"),
            Err(Error::NonIntegerExponent { offset: 2, .. })
        ));
        // 2.0 is an integer value and accepted
        assert_eq!(value("q^2.0", 3.0), 9.0);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(value("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(value("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(value("2 + 3 * 4", 0.0), 14.0);
        assert_eq!(value("-q^2", 3.0), -9.0);
        assert_eq!(value("- - q", 3.0), 3.0);
        assert_eq!(value("q^-2", 2.0), 0.25);
        assert_eq!(value("1.5e1 * .2", 0.0), 3.0);
        assert_eq!(value("  cosh ( q ) ", 0.0), 1.0);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "", "   ", "q +", "(q", "q)", "2 q", "x^2", "q^", "1e", "exp q",
        ] {
            assert!(parse_potential(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn derivatives_of_unit_quartic() {
        let e = parse_potential("(q^2 - 1)^2").unwrap();
        assert_eq!(eval_with_derivatives(&e, 1.0).unwrap(), (0.0, 0.0, 8.0));
        assert_eq!(eval_with_derivatives(&e, 0.0).unwrap(), (1.0, 0.0, -4.0));
    }

    #[test]
    fn even_polynomials_have_zero_slope_at_origin() {
        for text in [
            "q^4 - 3*q^2 + 2",
            "(q^2-4)^2",
            "(q^2-1)^2*(1+q^2/2)",
            "q^6/6 - q^2",
        ] {
            let e = parse_potential(text).unwrap();
            assert_eq!(eval_with_derivatives(&e, 0.0).unwrap().1, 0.0, "{text}");
        }
    }

    #[test]
    fn coefficient_list_matches_parsed_form() {
        let poly = PotentialExpr::polynomial(vec![1.0, 0.0, -2.0, 0.0, 1.0]);
        let parsed = parse_potential("(q^2-1)^2").unwrap();
        for q in [-1.7, -0.3, 0.0, 0.4, 2.2] {
            let a = eval_with_derivatives(&poly, q).unwrap();
            let b = eval_with_derivatives(&parsed, q).unwrap();
            assert!(
                (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12 && (a.2 - b.2).abs() < 1e-12
            );
        }
    }

    #[test]
    fn overflow_is_a_domain_error() {
        let e = parse_potential("exp(exp(q))").unwrap();
        assert!(matches!(
            eval_with_derivatives(&e, 10.0),
            Err(Error::Domain(_))
        ));
        let e = parse_potential("1/q").unwrap();
        assert!(matches!(
            eval_with_derivatives(&e, 0.0),
            Err(Error::Domain(_))
        ));
    }
}
