//! The cutoff `Θ_ℓ` and the small expression language for `ℓ`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 'y' | 'z' | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! On the plane `x, y` are the boundary coordinates. On the sphere `x, y, z`
//! are the ambient coordinates of the boundary point.

use serde::{Deserialize, Serialize};

use super::{BoundaryPoint, Model};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            s: text.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Evaluates at `(x, y, z)`.
    pub fn eval(&self, v: [f64; 3]) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var(i) => v[*i],
            Expr::Neg(a) => -a.eval(v),
            Expr::Add(a, b) => a.eval(v) + b.eval(v),
            Expr::Sub(a, b) => a.eval(v) - b.eval(v),
            Expr::Mul(a, b) => a.eval(v) * b.eval(v),
            Expr::Div(a, b) => a.eval(v) / b.eval(v),
            Expr::Pow(a, b) => {
                let e = b.eval(v);
                if e.fract() == 0.0 && e.abs() < 64.0 {
                    a.eval(v).powi(e as i32)
                } else {
                    a.eval(v).powf(e)
                }
            }
            Expr::Exp(a) => a.eval(v).exp(),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Num(c) => Some(*c),
            _ => None,
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                match &self.s[start..self.pos] {
                    b"x" => Ok(Expr::Var(0)),
                    b"y" => Ok(Expr::Var(1)),
                    b"z" => Ok(Expr::Var(2)),
                    b"exp" => {
                        if !self.eat(b'(') {
                            return Err(self.error("expected '(' after exp"));
                        }
                        let e = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected ')'"));
                        }
                        Ok(Expr::Exp(Box::new(e)))
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error("unknown identifier"))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.s.len() && (p.s[p.pos].is_ascii_digit() || p.s[p.pos] == b'.') {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.s.len() && (self.s[self.pos] == b'e' || self.s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.s.len() && (self.s[self.pos] == b'+' || self.s[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Expr::Num).map_err(|_| Error::Parse {
            pos: start,
            msg: format!("bad number `{text}`"),
        })
    }
}

/// A cutoff function `ℓ` with its scale `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CutoffText", into = "CutoffText")]
pub struct CutoffSpec {
    text: String,
    ell: Expr,
    pub epsilon: f64,
    pub model: Model,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CutoffText {
    ell: String,
    epsilon: f64,
    model: Model,
}

impl TryFrom<CutoffText> for CutoffSpec {
    type Error = Error;
    fn try_from(t: CutoffText) -> Result<Self> {
        CutoffSpec::new(&t.ell, t.epsilon, t.model)
    }
}

impl From<CutoffSpec> for CutoffText {
    fn from(c: CutoffSpec) -> Self {
        CutoffText {
            ell: c.text,
            epsilon: c.epsilon,
            model: c.model,
        }
    }
}

impl CutoffSpec {
    /// Parses `ell` and checks positivity on a sample grid of the boundary.
    pub fn new(ell: &str, epsilon: f64, model: Model) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        let spec = Self {
            text: ell.trim().into(),
            ell: Expr::parse(ell)?,
            epsilon,
            model,
        };
        for p in sample_grid(model) {
            let v = spec.ell.eval(p);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "ell = {v} at {p:?}; it must be positive and finite"
                )));
            }
        }
        Ok(spec)
    }

    pub fn constant(value: f64, epsilon: f64, model: Model) -> Result<Self> {
        Self::new(&format!("{value:e}"), epsilon, model)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn expr(&self) -> &Expr {
        &self.ell
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(&self.text, epsilon, self.model)
    }

    /// `ℓ` at a plane point `(x, y)` or sphere point `(x, y, z)`.
    pub fn ell(&self, p: [f64; 3]) -> f64 {
        self.ell.eval(p)
    }

    /// `ℓ` at a boundary point; `None` at `∞`.
    pub fn ell_at(&self, p: &BoundaryPoint) -> Option<f64> {
        match *p {
            BoundaryPoint::Sphere(v) => Some(self.ell(v)),
            BoundaryPoint::Plane(z) => Some(self.ell([z.re, z.im, 0.0])),
            BoundaryPoint::Infinity => None,
        }
    }
}

fn sample_grid(model: Model) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    match model {
        Model::Halfspace => {
            for i in -10..=10 {
                for j in -10..=10 {
                    out.push([i as f64 * 0.5, j as f64 * 0.5, 0.0]);
                }
            }
        }
        Model::Ball => {
            for i in 0..=12 {
                let th = std::f64::consts::PI * i as f64 / 12.0;
                for j in 0..24 {
                    let ph = std::f64::consts::PI * j as f64 / 12.0;
                    out.push([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                }
            }
        }
    }
    out
}

/// Boundary distance: great-circle on the sphere, Euclidean on the plane.
pub fn boundary_distance(z1: &BoundaryPoint, z2: &BoundaryPoint) -> f64 {
    match (z1, z2) {
        (BoundaryPoint::Sphere(a), BoundaryPoint::Sphere(b)) => {
            let cross = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            let s = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
            let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            s.atan2(c)
        }
        (BoundaryPoint::Plane(a), BoundaryPoint::Plane(b)) => (a - b).norm(),
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
        _ => f64::INFINITY,
    }
}

/// `Θ_{εℓ}(z1, z2)`: 0 if the endpoints are within `ε(ℓ(z1) + ℓ(z2))/2`, else 1.
pub fn cutoff_theta(spec: &CutoffSpec, z1: &BoundaryPoint, z2: &BoundaryPoint) -> u8 {
    let d = boundary_distance(z1, z2);
    match (spec.ell_at(z1), spec.ell_at(z2)) {
        (Some(l1), Some(l2)) if d <= spec.epsilon * (l1 + l2) / 2.0 => 0,
        _ if d == 0.0 => 0,
        _ => 1,
    }
}
