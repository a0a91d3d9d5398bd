//! Potentials that are polynomials in `x` with time-dependent coefficients.
//!
//! Text such as `x^2/2 + 0.1*cos(2*t)*x` is parsed by recursive descent and
//! expanded on the fly into `sum_n c_n(t) x^n`. Each `c_n(t)` is stored as a
//! [`TimeProfile`] tree and is, by construction, the Taylor coefficient
//! `(1/n!) d^n V / dx^n` at `x = 0`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := number | 'x' | 't' | fn '(' expr ')' | '(' expr ')'
//! fn     := 'sin' | 'cos' | 'exp'
//! ```
//!
//! `x` may not appear inside a function argument or in a denominator.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Largest accepted exponent after `^`.
const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("x appears inside a function argument (function at position {pos})")]
    XInsideFunction { pos: usize },
    #[error("x appears in a denominator (at position {pos})")]
    XInDenominator { pos: usize },
    #[error("exponent at position {pos} is not a non-negative integer")]
    NonIntegerPower { pos: usize },
}

impl PotentialError {
    pub fn position(&self) -> usize {
        match *self {
            Self::Syntax { pos, .. }
            | Self::XInsideFunction { pos }
            | Self::XInDenominator { pos }
            | Self::NonIntegerPower { pos } => pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero while evaluating the potential at t = {t}")]
    DivisionByZero { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

/// An expression in `t` alone.
///
/// Values are built through the simplifying constructors, which fold
/// constants and drop identities, so two profiles built from the same
/// expansion compare equal.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeProfile {
    Const(f64),
    T,
    Neg(Box<TimeProfile>),
    Add(Box<TimeProfile>, Box<TimeProfile>),
    Sub(Box<TimeProfile>, Box<TimeProfile>),
    Mul(Box<TimeProfile>, Box<TimeProfile>),
    Div(Box<TimeProfile>, Box<TimeProfile>),
    Pow(Box<TimeProfile>, u32),
    Call(Func, Box<TimeProfile>),
}

use TimeProfile as P;

fn finite_const(v: f64) -> Option<TimeProfile> {
    v.is_finite().then_some(P::Const(v))
}

impl TimeProfile {
    pub fn constant(v: f64) -> Self {
        P::Const(v)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self {
            P::Const(v) => Some(v),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn neg(a: Self) -> Self {
        match a {
            P::Const(v) => P::Const(-v),
            P::Neg(inner) => *inner,
            a => P::Neg(Box::new(a)),
        }
    }

    pub fn add(a: Self, b: Self) -> Self {
        match (&a, &b) {
            (P::Const(x), P::Const(y)) => finite_const(x + y).unwrap_or_else(|| P::Add(a.into(), b.into())),
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            _ => P::Add(a.into(), b.into()),
        }
    }

    pub fn sub(a: Self, b: Self) -> Self {
        match (&a, &b) {
            (P::Const(x), P::Const(y)) => finite_const(x - y).unwrap_or_else(|| P::Sub(a.into(), b.into())),
            _ if b.is_zero() => a,
            _ if a.is_zero() => Self::neg(b),
            _ => P::Sub(a.into(), b.into()),
        }
    }

    pub fn mul(a: Self, b: Self) -> Self {
        match (&a, &b) {
            (P::Const(x), P::Const(y)) => finite_const(x * y).unwrap_or_else(|| P::Mul(a.into(), b.into())),
            _ if a.is_zero() || b.is_zero() => P::Const(0.0),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            _ => P::Mul(a.into(), b.into()),
        }
    }

    pub fn div(a: Self, b: Self) -> Self {
        match (&a, &b) {
            (P::Const(x), P::Const(y)) if *y != 0.0 => {
                finite_const(x / y).unwrap_or_else(|| P::Div(a.into(), b.into()))
            }
            _ if b.is_one() => a,
            _ => P::Div(a.into(), b.into()),
        }
    }

    pub fn pow(a: Self, n: u32) -> Self {
        match (n, &a) {
            (0, _) => P::Const(1.0),
            (1, _) => a,
            (_, P::Const(x)) => finite_const(x.powi(n as i32)).unwrap_or(P::Pow(a.into(), n)),
            _ => P::Pow(a.into(), n),
        }
    }

    pub fn call(f: Func, a: Self) -> Self {
        match a {
            P::Const(x) => finite_const(f.apply(x)).unwrap_or(P::Call(f, Box::new(P::Const(x)))),
            a => P::Call(f, Box::new(a)),
        }
    }

    /// True when the profile does not depend on `t`.
    pub fn is_time_independent(&self) -> bool {
        match self {
            P::Const(_) => true,
            P::T => false,
            P::Neg(a) | P::Pow(a, _) | P::Call(_, a) => a.is_time_independent(),
            P::Add(a, b) | P::Sub(a, b) | P::Mul(a, b) | P::Div(a, b) => {
                a.is_time_independent() && b.is_time_independent()
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(match self {
            P::Const(v) => *v,
            P::T => t,
            P::Neg(a) => -a.eval(t)?,
            P::Add(a, b) => a.eval(t)? + b.eval(t)?,
            P::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            P::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            P::Div(a, b) => {
                let den = b.eval(t)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero { t });
                }
                a.eval(t)? / den
            }
            P::Pow(a, n) => a.eval(t)?.powi(*n as i32),
            P::Call(f, a) => f.apply(a.eval(t)?),
        })
    }
}

// Every compound node is parenthesized so that printing and re-parsing
// rebuilds the same tree.
impl fmt::Display for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P::Const(v) if v.is_sign_negative() => write!(f, "(-{:?})", -v),
            P::Const(v) => write!(f, "{v:?}"),
            P::T => f.write_str("t"),
            P::Neg(a) => write!(f, "(-{a})"),
            P::Add(a, b) => write!(f, "({a} + {b})"),
            P::Sub(a, b) => write!(f, "({a} - {b})"),
            P::Mul(a, b) => write!(f, "({a}*{b})"),
            P::Div(a, b) => write!(f, "({a}/{b})"),
            P::Pow(a, n) => write!(f, "({a}^{n})"),
            P::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// `V(x, t) = sum_n c_n(t) x^n` with `c_n` the Taylor coefficient of degree `n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PotentialModel {
    terms: BTreeMap<usize, TimeProfile>,
}

impl PotentialModel {
    /// The potential `V = 0`.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Time-independent polynomial from its coefficients `c_0, c_1, ...`.
    pub fn from_constants(coeffs: &[f64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(n, &c)| (n, P::Const(c)))
            .collect();
        Self { terms }
    }

    pub fn from_terms(terms: BTreeMap<usize, TimeProfile>) -> Self {
        let terms = terms.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Self { terms }
    }

    pub fn parse(text: &str) -> Result<Self, PotentialError> {
        parse_potential(text)
    }

    pub fn terms(&self) -> &BTreeMap<usize, TimeProfile> {
        &self.terms
    }

    pub fn term(&self, n: usize) -> Option<&TimeProfile> {
        self.terms.get(&n)
    }

    /// Largest degree present; `0` for the empty model.
    pub fn degree(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_time_independent(&self) -> bool {
        self.terms.values().all(TimeProfile::is_time_independent)
    }

    /// `V_0(t) ..= V_max_degree(t)`; degrees above `max_degree` are dropped.
    pub fn taylor_coefficients(&self, t: f64, max_degree: usize) -> Result<Vec<f64>, EvalError> {
        let mut out = vec![0.0; max_degree + 1];
        for (&n, profile) in self.terms.range(..=max_degree) {
            out[n] = profile.eval(t)?;
        }
        Ok(out)
    }

    /// `V(x, t)` by Horner's rule over the Taylor coefficients.
    pub fn eval_at(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        let coeffs = self.taylor_coefficients(t, self.degree())?;
        Ok(horner(&coeffs, x))
    }
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

impl fmt::Display for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (n, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match n {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*x")?,
                n => write!(f, "({c})*x^{n}")?,
            }
        }
        Ok(())
    }
}

pub fn parse_potential(text: &str) -> Result<PotentialModel, PotentialError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, index: 0 };
    let poly = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != Tok::End {
        return Err(PotentialError::Syntax {
            pos: tok.pos,
            msg: format!("unexpected {}", tok.kind.describe()),
        });
    }
    Ok(PotentialModel::from_terms(poly.0))
}

/// `V_0(t) ..= V_max_degree(t)` for a parsed model.
pub fn eval_taylor_coefficients(
    model: &PotentialModel,
    t: f64,
    max_degree: usize,
) -> Result<Vec<f64>, EvalError> {
    model.taylor_coefficients(t, max_degree)
}

pub fn eval_potential_at(model: &PotentialModel, x: f64, t: f64) -> Result<f64, EvalError> {
    model.eval_at(x, t)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number { value: f64, integral: bool },
    X,
    T,
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number { value, .. } => format!("number {value}"),
            Tok::X => "'x'".into(),
            Tok::T => "'t'".into(),
            Tok::Func(f) => format!("'{}'", f.name()),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, PotentialError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        let single = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            tokens.push(Token { kind, pos: start });
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == b'.' {
            let mut integral = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                integral = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    integral = false;
                    i = j;
                }
            }
            let literal = &text[start..i];
            let value: f64 = literal.parse().map_err(|_| PotentialError::Syntax {
                pos: start,
                msg: format!("malformed number '{literal}'"),
            })?;
            let integral = integral || value.fract() == 0.0;
            tokens.push(Token {
                kind: Tok::Number { value, integral },
                pos: start,
            });
            continue;
        }
        if ch.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let kind = match &text[start..i] {
                "x" => Tok::X,
                "t" => Tok::T,
                "sin" => Tok::Func(Func::Sin),
                "cos" => Tok::Func(Func::Cos),
                "exp" => Tok::Func(Func::Exp),
                other => {
                    return Err(PotentialError::Syntax {
                        pos: start,
                        msg: format!("unknown identifier '{other}'"),
                    })
                }
            };
            tokens.push(Token { kind, pos: start });
            continue;
        }
        let bad = text[start..].chars().next().unwrap_or('?');
        return Err(PotentialError::Syntax {
            pos: start,
            msg: format!("unexpected character '{bad}'"),
        });
    }
    tokens.push(Token {
        kind: Tok::End,
        pos: text.len(),
    });
    Ok(tokens)
}

/// Polynomial in `x` with profile coefficients; zero coefficients are absent.
#[derive(Debug, Clone)]
struct Poly(BTreeMap<usize, TimeProfile>);

impl Poly {
    fn constant(p: TimeProfile) -> Self {
        Self::monomial(0, p)
    }

    fn monomial(n: usize, p: TimeProfile) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(n, p);
        }
        Poly(terms)
    }

    fn degree(&self) -> usize {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    /// The coefficient of `x^0` if the polynomial has no `x` dependence.
    fn as_scalar(&self) -> Option<TimeProfile> {
        match self.degree() {
            0 => Some(self.0.get(&0).cloned().unwrap_or(P::Const(0.0))),
            _ => None,
        }
    }

    fn insert(&mut self, n: usize, p: TimeProfile) {
        if p.is_zero() {
            self.0.remove(&n);
        } else {
            self.0.insert(n, p);
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        for (n, q) in other.0 {
            let sum = match self.0.remove(&n) {
                Some(p) => P::add(p, q),
                None => q,
            };
            self.insert(n, sum);
        }
        self
    }

    fn sub(mut self, other: Poly) -> Poly {
        for (n, q) in other.0 {
            let diff = match self.0.remove(&n) {
                Some(p) => P::sub(p, q),
                None => P::neg(q),
            };
            self.insert(n, diff);
        }
        self
    }

    fn neg(self) -> Poly {
        Poly(self.0.into_iter().map(|(n, p)| (n, P::neg(p))).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly(BTreeMap::new());
        for (&i, p) in &self.0 {
            for (&j, q) in &other.0 {
                let prod = P::mul(p.clone(), q.clone());
                let acc = match out.0.remove(&(i + j)) {
                    Some(prev) => P::add(prev, prod),
                    None => prod,
                };
                out.insert(i + j, acc);
            }
        }
        out
    }

    fn div_scalar(self, d: &TimeProfile) -> Poly {
        Poly(
            self.0
                .into_iter()
                .map(|(n, p)| (n, P::div(p, d.clone())))
                .collect(),
        )
    }

    fn pow(self, n: u32) -> Poly {
        if let Some(s) = self.as_scalar() {
            return Poly::constant(P::pow(s, n));
        }
        let mut out = Poly::constant(P::Const(1.0));
        for _ in 0..n {
            out = out.mul(&self);
        }
        out
    }
}

struct Parser {
    tokens: Vec<Token>,
    index: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.index.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if self.index < self.tokens.len() - 1 {
            self.index += 1;
        }
        tok
    }

    fn expect(&mut self, kind: Tok) -> Result<Token, PotentialError> {
        let tok = self.bump();
        if tok.kind == kind {
            Ok(tok)
        } else {
            Err(PotentialError::Syntax {
                pos: tok.pos,
                msg: format!("expected {}, found {}", kind.describe(), tok.kind.describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Poly, PotentialError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().kind {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, PotentialError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().kind {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs);
                }
                Tok::Slash => {
                    let pos = self.bump().pos;
                    let rhs = self.factor()?;
                    let den = rhs.as_scalar().ok_or(PotentialError::XInDenominator { pos })?;
                    acc = acc.div_scalar(&den);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, PotentialError> {
        if self.peek().kind == Tok::Minus {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.peek().kind != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let tok = self.bump();
        match tok.kind {
            Tok::Number { value, integral } if integral && value >= 0.0 => {
                if value > MAX_EXPONENT as f64 {
                    return Err(PotentialError::Syntax {
                        pos: tok.pos,
                        msg: format!("exponent {value} exceeds the limit {MAX_EXPONENT}"),
                    });
                }
                Ok(base.pow(value as u32))
            }
            Tok::Number { .. } | Tok::Minus => Err(PotentialError::NonIntegerPower { pos: tok.pos }),
            other => Err(PotentialError::Syntax {
                pos: tok.pos,
                msg: format!("expected integer exponent, found {}", other.describe()),
            }),
        }
    }

    fn atom(&mut self) -> Result<Poly, PotentialError> {
        let tok = self.bump();
        match tok.kind {
            Tok::Number { value, .. } => Ok(Poly::constant(P::Const(value))),
            Tok::X => Ok(Poly::monomial(1, P::Const(1.0))),
            Tok::T => Ok(Poly::constant(P::T)),
            Tok::Func(func) => {
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                let arg = arg
                    .as_scalar()
                    .ok_or(PotentialError::XInsideFunction { pos: tok.pos })?;
                Ok(Poly::constant(P::call(func, arg)))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(PotentialError::Syntax {
                pos: tok.pos,
                msg: format!("expected a number, 'x', 't', a function or '(', found {}", other.describe()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn coeffs(text: &str, t: f64, max: usize) -> Vec<f64> {
        parse_potential(text).unwrap().taylor_coefficients(t, max).unwrap()
    }

    #[test]
    fn half_x_squared() {
        let m = parse_potential("x^2/2").unwrap();
        assert_eq!(m.terms().len(), 1);
        assert_eq!(m.term(2), Some(&P::Const(0.5)));
    }

    #[test]
    fn cosine_driven_linear_term() {
        let m = parse_potential("cos(2*t)*x").unwrap();
        assert_eq!(m.terms().len(), 1);
        assert_eq!(
            m.term(1),
            Some(&P::Call(Func::Cos, Box::new(P::Mul(Box::new(P::Const(2.0)), Box::new(P::T)))))
        );
    }

    #[test]
    fn constraint_errors() {
        assert_eq!(parse_potential("exp(x)"), Err(PotentialError::XInsideFunction { pos: 0 }));
        assert_eq!(parse_potential("1/x"), Err(PotentialError::XInDenominator { pos: 1 }));
        assert_eq!(parse_potential("x^2.5"), Err(PotentialError::NonIntegerPower { pos: 2 }));
        assert_eq!(parse_potential("x^-1"), Err(PotentialError::NonIntegerPower { pos: 2 }));
        assert!(matches!(parse_potential("t*(x/(1+x))"), Err(PotentialError::XInDenominator { .. })));
        assert!(matches!(parse_potential("sin(t + 2*x)"), Err(PotentialError::XInsideFunction { pos: 0 })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_potential("x + * 2").unwrap_err();
        assert_eq!(err.position(), 4);
        assert!(matches!(err, PotentialError::Syntax { .. }));
        assert_eq!(parse_potential("").unwrap_err().position(), 0);
        assert_eq!(parse_potential("x^2^3").unwrap_err().position(), 3);
        assert_eq!(parse_potential("tan(t)").unwrap_err().position(), 0);
        assert_eq!(parse_potential("(x + 1").unwrap_err().position(), 6);
        assert_eq!(parse_potential("x $ 1").unwrap_err().position(), 2);
    }

    #[test]
    fn taylor_read_off() {
        assert_eq!(coeffs("t*x^3", 2.0, 4), vec![0.0, 0.0, 0.0, 2.0, 0.0]);
        assert_eq!(coeffs("x^2/2 + cos(t)*x", 0.0, 3), vec![0.0, 1.0, 0.5, 0.0]);
        assert_eq!(PotentialModel::zero().taylor_coefficients(3.7, 3).unwrap(), vec![0.0; 4]);
        // high-degree terms are truncated, not an error
        assert_eq!(coeffs("x^5 + 3", 0.0, 2), vec![3.0, 0.0, 0.0]);
    }

    #[test]
    fn pointwise_evaluation() {
        let m = parse_potential("x^2/2").unwrap();
        assert_eq!(m.eval_at(2.0, 123.0).unwrap(), 2.0);
        let m = parse_potential("cos(2*t)*x").unwrap();
        assert_eq!(m.eval_at(3.0, 0.0).unwrap(), 3.0);
        assert_eq!(PotentialModel::zero().eval_at(1.5, -2.0).unwrap(), 0.0);
    }

    #[test]
    fn division_by_zero_is_an_evaluation_error() {
        let m = parse_potential("x/t").unwrap();
        assert_eq!(m.taylor_coefficients(0.0, 2), Err(EvalError::DivisionByZero { t: 0.0 }));
        assert_eq!(m.taylor_coefficients(2.0, 2).unwrap(), vec![0.0, 0.5, 0.0]);
    }

    #[test]
    fn expansion_collects_powers() {
        // (x + t)^2 = x^2 + 2 t x + t^2
        let m = parse_potential("(x + t)^2").unwrap();
        assert_eq!(m.degree(), 2);
        assert_eq!(m.taylor_coefficients(3.0, 2).unwrap(), vec![9.0, 6.0, 1.0]);
        let m = parse_potential("x - x").unwrap();
        assert!(m.is_empty());
        let m = parse_potential("-x^2").unwrap();
        assert_eq!(m.term(2), Some(&P::Const(-1.0)));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(coeffs("-2^2", 0.0, 0), vec![-4.0]);
        assert_eq!(coeffs("(-2)^2", 0.0, 0), vec![4.0]);
    }

    #[test]
    fn numbers_accept_exponents() {
        assert_eq!(coeffs("1.5e-3*x + .25", 0.0, 1), vec![0.25, 1.5e-3]);
        assert_eq!(coeffs("2E2", 0.0, 0), vec![200.0]);
    }

    #[test]
    fn time_independence() {
        assert!(parse_potential("x^2/2 + 0.01*x^4").unwrap().is_time_independent());
        assert!(!parse_potential("sin(t)*x").unwrap().is_time_independent());
    }

    #[test]
    fn print_reparse_fixpoint_examples() {
        for text in [
            "x^2/2",
            "cos(2*t)*x",
            "0",
            "-3*x^4 + exp(-t)*x - 1e-7",
            "(1 + t)^3*x/(2 - sin(t)) + t/(t - 1)",
            "-(t*t)*x^2 - (-t)",
            "x^2/2 + 0.01*x^4",
        ] {
            let m = parse_potential(text).unwrap();
            let printed = m.to_string();
            let again = parse_potential(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert_eq!(again, m, "{text} -> {printed}");
        }
    }

    proptest! {
        #[test]
        fn degree_bookkeeping(a in 0u32..20, b in 0u32..20) {
            let m = parse_potential(&format!("x^{a} * x^{b}")).unwrap();
            prop_assert_eq!(m.terms().len(), 1);
            prop_assert_eq!(m.degree(), (a + b) as usize);
            prop_assert_eq!(m.term((a + b) as usize), Some(&P::Const(1.0)));
        }
    }
}
