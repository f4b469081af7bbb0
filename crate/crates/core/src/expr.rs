//! Closed-form expressions in one variable `t`.
//!
//! Expressions evaluate over any [`Scalar`], so the same tree gives plain
//! values, Taylor jets for exact derivatives, and double-double values for the
//! coordinate oracle. Symbolic differentiation is available for references
//! that must be evaluated in extended precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::jet::Scalar;

#[derive(Debug)]
enum Node {
    Var,
    Const(f64),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Powi(Expr, i32),
    Powf(Expr, f64),
    Sqrt(Expr),
    Exp(Expr),
    Ln(Expr),
    Sin(Expr),
    Cos(Expr),
    Sinh(Expr),
    Cosh(Expr),
}

#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn node(n: Node) -> Self {
        Expr(Arc::new(n))
    }

    pub fn t() -> Self {
        Expr::node(Node::Var)
    }

    pub fn cst(v: f64) -> Self {
        Expr::node(Node::Const(v))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(v) => Some(v),
            _ => None,
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        match (k, self.as_const()) {
            (0, _) => Expr::cst(1.0),
            (1, _) => self.clone(),
            (_, Some(v)) => Expr::cst(v.powi(k)),
            _ => Expr::node(Node::Powi(self.clone(), k)),
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        if p.fract() == 0.0 && p.abs() < 64.0 {
            return self.powi(p as i32);
        }
        Expr::node(Node::Powf(self.clone(), p))
    }

    pub fn sqrt(&self) -> Self {
        Expr::node(Node::Sqrt(self.clone()))
    }
    pub fn exp(&self) -> Self {
        Expr::node(Node::Exp(self.clone()))
    }
    pub fn ln(&self) -> Self {
        Expr::node(Node::Ln(self.clone()))
    }
    pub fn sin(&self) -> Self {
        Expr::node(Node::Sin(self.clone()))
    }
    pub fn cos(&self) -> Self {
        Expr::node(Node::Cos(self.clone()))
    }
    pub fn sinh(&self) -> Self {
        Expr::node(Node::Sinh(self.clone()))
    }
    pub fn cosh(&self) -> Self {
        Expr::node(Node::Cosh(self.clone()))
    }

    pub fn eval<S: Scalar>(&self, t: S) -> S {
        match &*self.0 {
            Node::Var => t,
            Node::Const(v) => S::cst(*v),
            Node::Add(a, b) => a.eval(t) + b.eval(t),
            Node::Sub(a, b) => a.eval(t) - b.eval(t),
            Node::Mul(a, b) => a.eval(t) * b.eval(t),
            Node::Div(a, b) => a.eval(t) / b.eval(t),
            Node::Neg(a) => -a.eval(t),
            Node::Powi(a, k) => a.eval(t).powi(*k),
            Node::Powf(a, p) => a.eval(t).powf(*p),
            Node::Sqrt(a) => a.eval(t).sqrt(),
            Node::Exp(a) => a.eval(t).exp(),
            Node::Ln(a) => a.eval(t).ln(),
            Node::Sin(a) => a.eval(t).sin(),
            Node::Cos(a) => a.eval(t).cos(),
            Node::Sinh(a) => a.eval(t).sinh(),
            Node::Cosh(a) => a.eval(t).cosh(),
        }
    }

    /// d/dt, with constant folding of the trivial cases.
    pub fn derivative(&self) -> Expr {
        match &*self.0 {
            Node::Var => Expr::cst(1.0),
            Node::Const(_) => Expr::cst(0.0),
            Node::Add(a, b) => a.derivative() + b.derivative(),
            Node::Sub(a, b) => a.derivative() - b.derivative(),
            Node::Mul(a, b) => a.derivative() * b.clone() + a.clone() * b.derivative(),
            Node::Div(a, b) => (a.derivative() * b.clone() - a.clone() * b.derivative()) / b.powi(2),
            Node::Neg(a) => -a.derivative(),
            Node::Powi(a, k) => a.powi(k - 1) * (*k as f64) * a.derivative(),
            Node::Powf(a, p) => a.powf(p - 1.0) * *p * a.derivative(),
            Node::Sqrt(a) => a.derivative() / (self.clone() * 2.0),
            Node::Exp(a) => self.clone() * a.derivative(),
            Node::Ln(a) => a.derivative() / a.clone(),
            Node::Sin(a) => a.cos() * a.derivative(),
            Node::Cos(a) => -(a.sin() * a.derivative()),
            Node::Sinh(a) => a.cosh() * a.derivative(),
            Node::Cosh(a) => a.sinh() * a.derivative(),
        }
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            s: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }
}

fn fold(a: &Expr, b: &Expr, op: fn(f64, f64) -> f64) -> Option<Expr> {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Some(Expr::cst(op(x, y))),
        _ => None,
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        if let Some(e) = fold(&self, &o, |x, y| x + y) {
            return e;
        }
        match (self.as_const(), o.as_const()) {
            (Some(z), _) if z == 0.0 => o,
            (_, Some(z)) if z == 0.0 => self,
            _ => Expr::node(Node::Add(self, o)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        if let Some(e) = fold(&self, &o, |x, y| x - y) {
            return e;
        }
        match (self.as_const(), o.as_const()) {
            (Some(z), _) if z == 0.0 => -o,
            (_, Some(z)) if z == 0.0 => self,
            _ => Expr::node(Node::Sub(self, o)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        if let Some(e) = fold(&self, &o, |x, y| x * y) {
            return e;
        }
        match (self.as_const(), o.as_const()) {
            (Some(z), _) | (_, Some(z)) if z == 0.0 => Expr::cst(0.0),
            (Some(u), _) if u == 1.0 => o,
            (_, Some(u)) if u == 1.0 => self,
            _ => Expr::node(Node::Mul(self, o)),
        }
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        if let Some(e) = fold(&self, &o, |x, y| x / y) {
            return e;
        }
        match (self.as_const(), o.as_const()) {
            (Some(z), _) if z == 0.0 => Expr::cst(0.0),
            (_, Some(u)) if u == 1.0 => self,
            _ => Expr::node(Node::Div(self, o)),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.as_const() {
            Some(v) => Expr::cst(-v),
            None => Expr::node(Node::Neg(self)),
        }
    }
}

macro_rules! scalar_rhs {
    ($tr:ident, $m:ident) => {
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $m(self, o: f64) -> Expr {
                $tr::$m(self, Expr::cst(o))
            }
        }
        impl $tr<Expr> for f64 {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                $tr::$m(Expr::cst(self), o)
            }
        }
    };
}
scalar_rhs!(Add, add);
scalar_rhs!(Sub, sub);
scalar_rhs!(Mul, mul);
scalar_rhs!(Div, div);

fn fmt_num(v: f64) -> String {
    // `{:?}` is the shortest representation that round-trips
    if v < 0.0 {
        format!("({v:?})")
    } else {
        format!("{v:?}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Var => write!(f, "t"),
            Node::Const(v) => write!(f, "{}", fmt_num(*v)),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Powi(a, k) => write!(f, "({a}^{})", fmt_num(*k as f64)),
            Node::Powf(a, p) => write!(f, "({a}^{})", fmt_num(*p)),
            Node::Sqrt(a) => write!(f, "sqrt({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Ln(a) => write!(f, "ln({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Sinh(a) => write!(f, "sinh({a})"),
            Node::Cosh(a) => write!(f, "cosh({a})"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> LabError {
        LabError::Parse(format!("{msg} at offset {}", self.pos))
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = lhs + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = lhs * self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let ex = self.unary()?;
            return Ok(match ex.as_const() {
                Some(p) => base.powf(p),
                None => (ex * base.ln()).exp(),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                match name {
                    "t" => Ok(Expr::t()),
                    "pi" => Ok(Expr::cst(std::f64::consts::PI)),
                    _ => {
                        let arg = {
                            self.expect(b'(')?;
                            let a = self.expr()?;
                            self.expect(b')')?;
                            a
                        };
                        match name {
                            "sqrt" => Ok(arg.sqrt()),
                            "exp" => Ok(arg.exp()),
                            "ln" | "log" => Ok(arg.ln()),
                            "sin" => Ok(arg.sin()),
                            "cos" => Ok(arg.cos()),
                            "sinh" => Ok(arg.sinh()),
                            "cosh" => Ok(arg.cosh()),
                            _ => Err(LabError::Parse(format!("unknown function '{name}'"))),
                        }
                    }
                }
            }
            _ => Err(self.err("expected a number, 't', a function or '('")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.s;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        let txt = std::str::from_utf8(&s[start..i]).unwrap_or("");
        txt.parse::<f64>()
            .map(Expr::cst)
            .map_err(|_| LabError::Parse(format!("bad number '{txt}'")))
    }
}
