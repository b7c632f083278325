//! Scalar expression trees with exact symbolic differentiation.
//!
//! Text syntax is prefix notation with one node per parenthesized group:
//!
//! ```text
//! x0  1.5  (+ a b)  (- a b)  (* a b)  (/ a b)  (^ a 3)
//! (neg a)  (sin a)  (cos a)  (exp a)  (sqrt a)
//! ```
//!
//! Constants print with the shortest representation that parses back to the
//! same bits, so `parse(print(e))` reproduces `e` node for node.
//!
//! Division and square root carry domain guards: a denominator that vanishes
//! (or is below [`GUARD_EPS`] in magnitude) and a negative radicand produce a
//! [`DomainError`] naming the guard instead of a NaN or infinity.

use std::fmt;
use std::ops;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::exterior::Coeff;

/// Denominators smaller than this in magnitude trip the division guard.
pub const GUARD_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain guard `{guard}` violated by {expr} (value {value:e})")]
pub struct DomainError {
    pub guard: &'static str,
    pub expr: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at token {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Var(usize),
    Const(f64),
    Add(ScalarExpr, ScalarExpr),
    Sub(ScalarExpr, ScalarExpr),
    Mul(ScalarExpr, ScalarExpr),
    Div(ScalarExpr, ScalarExpr),
    Pow(ScalarExpr, i32),
    Neg(ScalarExpr),
    Sin(ScalarExpr),
    Cos(ScalarExpr),
    Exp(ScalarExpr),
    Sqrt(ScalarExpr),
}

/// Immutable, cheaply clonable expression over chart variables `x0, x1, ...`.
#[derive(Clone, PartialEq)]
pub struct ScalarExpr(Arc<Node>);

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl ScalarExpr {
    /// Wrap a node verbatim, without simplification.
    pub fn from_node(node: Node) -> Self {
        Self(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn var(i: usize) -> Self {
        Self::from_node(Node::Var(i))
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn powi(&self, n: i32) -> Self {
        match (n, self.as_const()) {
            (0, _) => Self::one(),
            (1, _) => self.clone(),
            (_, Some(c)) if c != 0.0 || n > 0 => Self::constant(c.powi(n)),
            _ => Self::from_node(Node::Pow(self.clone(), n)),
        }
    }

    pub fn sin(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.sin()),
            None => Self::from_node(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.cos()),
            None => Self::from_node(Node::Cos(self.clone())),
        }
    }

    pub fn exp(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.exp()),
            None => Self::from_node(Node::Exp(self.clone())),
        }
    }

    pub fn sqrt(&self) -> Self {
        match self.as_const() {
            Some(c) if c >= 0.0 => Self::constant(c.sqrt()),
            _ => Self::from_node(Node::Sqrt(self.clone())),
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        match &*self.0 {
            Node::Var(_) | Node::Const(_) => 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => 1 + a.size() + b.size(),
            Node::Pow(a, _) | Node::Neg(a) | Node::Sin(a) | Node::Cos(a) | Node::Exp(a) | Node::Sqrt(a) => {
                1 + a.size()
            }
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match &*self.0 {
            Node::Var(i) => Some(*i),
            Node::Const(_) => None,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Node::Pow(a, _) | Node::Neg(a) | Node::Sin(a) | Node::Cos(a) | Node::Exp(a) | Node::Sqrt(a) => a.max_var(),
        }
    }

    /// Evaluate at a point; guard violations are reported, never silently NaN.
    pub fn eval(&self, x: &[f64]) -> Result<f64, DomainError> {
        Ok(match &*self.0 {
            Node::Var(i) => x[*i],
            Node::Const(c) => *c,
            Node::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Node::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Node::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Node::Div(a, b) => {
                let d = b.eval(x)?;
                if !(d.abs() >= GUARD_EPS) {
                    return Err(DomainError { guard: "denominator != 0", expr: self.to_string(), value: d });
                }
                a.eval(x)? / d
            }
            Node::Pow(a, n) => {
                let v = a.eval(x)?;
                if *n < 0 && !(v.abs() >= GUARD_EPS) {
                    return Err(DomainError { guard: "base != 0 for negative power", expr: self.to_string(), value: v });
                }
                v.powi(*n)
            }
            Node::Neg(a) => -a.eval(x)?,
            Node::Sin(a) => a.eval(x)?.sin(),
            Node::Cos(a) => a.eval(x)?.cos(),
            Node::Exp(a) => a.eval(x)?.exp(),
            Node::Sqrt(a) => {
                let v = a.eval(x)?;
                if !(v >= 0.0) {
                    return Err(DomainError { guard: "radicand >= 0", expr: self.to_string(), value: v });
                }
                v.sqrt()
            }
        })
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Self {
        match &*self.0 {
            Node::Var(j) => {
                if *j == i {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Node::Const(_) => Self::zero(),
            Node::Add(a, b) => a.diff(i) + b.diff(i),
            Node::Sub(a, b) => a.diff(i) - b.diff(i),
            Node::Mul(a, b) => a.diff(i) * b.clone() + a.clone() * b.diff(i),
            Node::Div(a, b) => {
                let (da, db) = (a.diff(i), b.diff(i));
                if db.is_zero() {
                    da / b.clone()
                } else {
                    (da * b.clone() - a.clone() * db) / b.powi(2)
                }
            }
            Node::Pow(a, n) => Self::constant(*n as f64) * a.powi(n - 1) * a.diff(i),
            Node::Neg(a) => -a.diff(i),
            Node::Sin(a) => a.cos() * a.diff(i),
            Node::Cos(a) => -(a.sin() * a.diff(i)),
            Node::Exp(a) => self.clone() * a.diff(i),
            Node::Sqrt(a) => a.diff(i) / (Self::constant(2.0) * self.clone()),
        }
    }

    /// Replace every `x_i` by `subs[i]`.
    pub fn substitute(&self, subs: &[ScalarExpr]) -> Self {
        match &*self.0 {
            Node::Var(i) => subs[*i].clone(),
            Node::Const(_) => self.clone(),
            Node::Add(a, b) => a.substitute(subs) + b.substitute(subs),
            Node::Sub(a, b) => a.substitute(subs) - b.substitute(subs),
            Node::Mul(a, b) => a.substitute(subs) * b.substitute(subs),
            Node::Div(a, b) => a.substitute(subs) / b.substitute(subs),
            Node::Pow(a, n) => a.substitute(subs).powi(*n),
            Node::Neg(a) => -a.substitute(subs),
            Node::Sin(a) => a.substitute(subs).sin(),
            Node::Cos(a) => a.substitute(subs).cos(),
            Node::Exp(a) => a.substitute(subs).exp(),
            Node::Sqrt(a) => a.substitute(subs).sqrt(),
        }
    }

    /// Sum of an iterator of expressions (zero when empty).
    pub fn sum<I: IntoIterator<Item = ScalarExpr>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }

    /// Parse the canonical prefix syntax.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let e = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(ParseError { position: pos, message: "trailing input".into() });
        }
        Ok(e)
    }
}

fn add(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => ScalarExpr::constant(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => ScalarExpr::from_node(Node::Add(a, b)),
    }
}

fn sub(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => ScalarExpr::constant(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => ScalarExpr::from_node(Node::Sub(a, b)),
    }
}

fn mul(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => ScalarExpr::constant(x * y),
        (Some(x), _) if x == 0.0 => ScalarExpr::zero(),
        (_, Some(y)) if y == 0.0 => ScalarExpr::zero(),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => ScalarExpr::from_node(Node::Mul(a, b)),
    }
}

fn div(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != 0.0 => ScalarExpr::constant(x / y),
        (Some(x), _) if x == 0.0 => ScalarExpr::zero(),
        _ if b.is_one() => a,
        _ => ScalarExpr::from_node(Node::Div(a, b)),
    }
}

fn neg(a: ScalarExpr) -> ScalarExpr {
    match &*a.0 {
        Node::Const(c) => ScalarExpr::constant(-c),
        Node::Neg(inner) => inner.clone(),
        _ => ScalarExpr::from_node(Node::Neg(a)),
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $f:ident) => {
        impl ops::$tr for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                $f(self, rhs)
            }
        }
        impl ops::$tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                $f(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<f64> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: f64) -> ScalarExpr {
                $f(self, ScalarExpr::constant(rhs))
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        neg(self)
    }
}

impl ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        neg(self.clone())
    }
}

impl From<f64> for ScalarExpr {
    fn from(c: f64) -> Self {
        Self::constant(c)
    }
}

impl Coeff for ScalarExpr {
    fn zero() -> Self {
        ScalarExpr::zero()
    }
    fn is_zero(&self) -> bool {
        ScalarExpr::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Var(i) => write!(f, "x{i}"),
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Add(a, b) => write!(f, "(+ {a} {b})"),
            Node::Sub(a, b) => write!(f, "(- {a} {b})"),
            Node::Mul(a, b) => write!(f, "(* {a} {b})"),
            Node::Div(a, b) => write!(f, "(/ {a} {b})"),
            Node::Pow(a, n) => write!(f, "(^ {a} {n})"),
            Node::Neg(a) => write!(f, "(neg {a})"),
            Node::Sin(a) => write!(f, "(sin {a})"),
            Node::Cos(a) => write!(f, "(cos {a})"),
            Node::Exp(a) => write!(f, "(exp {a})"),
            Node::Sqrt(a) => write!(f, "(sqrt {a})"),
        }
    }
}

impl FromStr for ScalarExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        Self::parse(s)
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Result<ScalarExpr, ParseError> {
    let err = |p: usize, m: &str| ParseError { position: p, message: m.to_string() };
    let tok = tokens.get(*pos).ok_or_else(|| err(*pos, "unexpected end of input"))?;
    *pos += 1;
    if tok == ")" {
        return Err(err(*pos - 1, "unexpected ')'"));
    }
    if tok != "(" {
        return parse_atom(tok).ok_or_else(|| err(*pos - 1, &format!("bad atom `{tok}`")));
    }
    let op_pos = *pos;
    let op = tokens.get(*pos).ok_or_else(|| err(*pos, "missing operator"))?.clone();
    *pos += 1;
    let node = match op.as_str() {
        "+" | "-" | "*" | "/" => {
            let a = parse_tokens(tokens, pos)?;
            let b = parse_tokens(tokens, pos)?;
            match op.as_str() {
                "+" => Node::Add(a, b),
                "-" => Node::Sub(a, b),
                "*" => Node::Mul(a, b),
                _ => Node::Div(a, b),
            }
        }
        "^" => {
            let a = parse_tokens(tokens, pos)?;
            let n_tok = tokens.get(*pos).ok_or_else(|| err(*pos, "missing exponent"))?;
            let n: i32 = n_tok.parse().map_err(|_| err(*pos, "exponent must be an integer"))?;
            *pos += 1;
            Node::Pow(a, n)
        }
        "neg" | "sin" | "cos" | "exp" | "sqrt" => {
            let a = parse_tokens(tokens, pos)?;
            match op.as_str() {
                "neg" => Node::Neg(a),
                "sin" => Node::Sin(a),
                "cos" => Node::Cos(a),
                "exp" => Node::Exp(a),
                _ => Node::Sqrt(a),
            }
        }
        _ => return Err(err(op_pos, &format!("unknown operator `{op}`"))),
    };
    match tokens.get(*pos) {
        Some(t) if t == ")" => *pos += 1,
        _ => return Err(err(*pos, "expected ')'")),
    }
    Ok(ScalarExpr::from_node(node))
}

fn parse_atom(tok: &str) -> Option<ScalarExpr> {
    if let Some(rest) = tok.strip_prefix('x') {
        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
            return rest.parse().ok().map(ScalarExpr::var);
        }
        return None;
    }
    tok.parse::<f64>().ok().map(ScalarExpr::constant)
}
