//! A small expression language for curves, forms and scalar functions.
//!
//! Grammar: sums and products of numbers, variables, basis atoms `e1..ed`,
//! `pi`, integer powers `^n` and the functions `sin`, `cos`, `exp`.
//! An expression evaluates either to a scalar or to a coefficient vector in
//! an algebra basis, e.g. `sin(t)*e1 + 0.5*e3`.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    /// Zero-based index into the algebra basis (`e1` is `Basis(0)`).
    Basis(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// Result of evaluating an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(DVector<f64>),
}

impl Value {
    fn add(self, other: Value, sign: f64) -> Result<Value> {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a + sign * b)),
            (Value::Vector(a), Value::Vector(b)) => Ok(Value::Vector(a + b * sign)),
            // a literal zero is accepted where a vector is expected
            (Value::Vector(a), Value::Scalar(b)) if b == 0.0 => Ok(Value::Vector(a)),
            (Value::Scalar(a), Value::Vector(b)) if a == 0.0 => Ok(Value::Vector(b * sign)),
            _ => Err(Error::Domain("cannot add a scalar to an algebra element".into())),
        }
    }

    fn mul(self, other: Value) -> Result<Value> {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a * b)),
            (Value::Scalar(a), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(a)) => {
                Ok(Value::Vector(v * a))
            }
            _ => Err(Error::Domain("product of two algebra elements is not defined".into())),
        }
    }

    fn scalar(self, what: &str) -> Result<f64> {
        match self {
            Value::Scalar(v) => Ok(v),
            Value::Vector(_) => Err(Error::Domain(format!("{what} needs a scalar argument"))),
        }
    }
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if let Some((pos, tok)) = p.tokens.get(p.pos) {
            return Err(Error::Parse {
                pos: *pos,
                msg: format!("unexpected `{tok}`"),
            });
        }
        Ok(e)
    }

    /// Evaluates with the given variable bindings; `dim` bounds the basis atoms.
    pub fn eval(&self, vars: &[(&str, f64)], dim: usize) -> Result<Value> {
        Ok(match self {
            Expr::Num(v) => Value::Scalar(*v),
            Expr::Var(name) => match vars.iter().find(|(n, _)| n == name) {
                Some((_, v)) => Value::Scalar(*v),
                None => return Err(Error::Domain(format!("unbound variable `{name}`"))),
            },
            Expr::Basis(i) => {
                if *i >= dim {
                    return Err(Error::Domain(format!(
                        "basis atom e{} exceeds algebra dimension {dim}",
                        i + 1
                    )));
                }
                let mut v = DVector::zeros(dim);
                v[*i] = 1.0;
                Value::Vector(v)
            }
            Expr::Neg(a) => a.eval(vars, dim)?.mul(Value::Scalar(-1.0))?,
            Expr::Add(a, c) => a.eval(vars, dim)?.add(c.eval(vars, dim)?, 1.0)?,
            Expr::Sub(a, c) => a.eval(vars, dim)?.add(c.eval(vars, dim)?, -1.0)?,
            Expr::Mul(a, c) => a.eval(vars, dim)?.mul(c.eval(vars, dim)?)?,
            Expr::Div(a, c) => {
                let den = c.eval(vars, dim)?.scalar("division")?;
                a.eval(vars, dim)?.mul(Value::Scalar(1.0 / den))?
            }
            Expr::Pow(a, n) => Value::Scalar(a.eval(vars, dim)?.scalar("power")?.powi(*n)),
            Expr::Call(f, a) => Value::Scalar(f.apply(a.eval(vars, dim)?.scalar(f.name())?)),
        })
    }

    pub fn eval_scalar(&self, vars: &[(&str, f64)]) -> Result<f64> {
        self.eval(vars, 0)?.scalar("a scalar expression")
    }

    /// Coefficient vector of length `dim`; a scalar zero reads as the zero vector.
    pub fn eval_vector(&self, vars: &[(&str, f64)], dim: usize) -> Result<DVector<f64>> {
        match self.eval(vars, dim)? {
            Value::Vector(v) => Ok(v),
            Value::Scalar(s) if s == 0.0 => Ok(DVector::zeros(dim)),
            Value::Scalar(_) => Err(Error::Domain(
                "expected an algebra-valued expression (use basis atoms e1, e2, ...)".into(),
            )),
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, var: &str) -> Expr {
        match self {
            Expr::Num(_) | Expr::Basis(_) => Expr::Num(0.0),
            Expr::Var(n) => Expr::Num(if n == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.diff(var)),
            Expr::Add(a, c) => add(a.diff(var), c.diff(var)),
            Expr::Sub(a, c) => sub(a.diff(var), c.diff(var)),
            Expr::Mul(a, c) => add(
                mul(a.diff(var), (**c).clone()),
                mul((**a).clone(), c.diff(var)),
            ),
            Expr::Div(a, c) => {
                let num = sub(
                    mul(a.diff(var), (**c).clone()),
                    mul((**a).clone(), c.diff(var)),
                );
                div(num, Expr::Pow(c.clone(), 2))
            }
            Expr::Pow(a, n) => mul(
                mul(Expr::Num(*n as f64), pow((**a).clone(), n - 1)),
                a.diff(var),
            ),
            Expr::Call(f, a) => {
                let outer = match f {
                    Func::Sin => Expr::Call(Func::Cos, a.clone()),
                    Func::Cos => neg(Expr::Call(Func::Sin, a.clone())),
                    Func::Exp => self.clone(),
                };
                mul(outer, a.diff(var))
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Var(n) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    /// Number of basis atoms needed, i.e. the largest `k` in any `ek`.
    pub fn basis_extent(&self) -> usize {
        let mut m = 0;
        self.walk(&mut |e| {
            if let Expr::Basis(i) = e {
                m = m.max(i + 1);
            }
        });
        m
    }

    fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Basis(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.walk(f),
            Expr::Add(a, c) | Expr::Sub(a, c) | Expr::Mul(a, c) | Expr::Div(a, c) => {
                a.walk(f);
                c.walk(f);
            }
        }
    }
}

fn is_num(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Num(x) if *x == v)
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(-v),
        other => Expr::Neg(b(other)),
    }
}

fn add(a: Expr, c: Expr) -> Expr {
    if is_num(&a, 0.0) {
        c
    } else if is_num(&c, 0.0) {
        a
    } else {
        Expr::Add(b(a), b(c))
    }
}

fn sub(a: Expr, c: Expr) -> Expr {
    if is_num(&c, 0.0) {
        a
    } else if is_num(&a, 0.0) {
        neg(c)
    } else {
        Expr::Sub(b(a), b(c))
    }
}

fn mul(a: Expr, c: Expr) -> Expr {
    if is_num(&a, 0.0) || is_num(&c, 0.0) {
        Expr::Num(0.0)
    } else if is_num(&a, 1.0) {
        c
    } else if is_num(&c, 1.0) {
        a
    } else {
        Expr::Mul(b(a), b(c))
    }
}

fn div(a: Expr, c: Expr) -> Expr {
    if is_num(&a, 0.0) {
        Expr::Num(0.0)
    } else {
        Expr::Div(b(a), b(c))
    }
}

fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Num(1.0),
        1 => a,
        _ => Expr::Pow(b(a), n),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(n) => f.write_str(n),
            Expr::Basis(i) => write!(f, "e{}", i + 1),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, c) => write!(f, "({a} + {c})"),
            Expr::Sub(a, c) => write!(f, "({a} - {c})"),
            Expr::Mul(a, c) => write!(f, "{a}*{c}"),
            Expr::Div(a, c) => write!(f, "{a}/({c})"),
            Expr::Pow(a, n) => write!(f, "({a})^{n}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Op(c) => write!(f, "{c}"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3 (but not `2*e1`, which never reaches here)
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| Error::Parse {
                pos: start,
                msg: format!("bad number `{text}`"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .or_else(|| self.tokens.last().map(|(p, _)| p + 1))
            .unwrap_or(0)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(b(lhs), b(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(b(lhs), b(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(b(lhs), b(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(b(lhs), b(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(b(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.here();
        let negative = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < 1e6 => {
                self.pos += 1;
                let n = v as i32;
                Ok(Expr::Pow(b(base), if negative { -n } else { n }))
            }
            _ => Err(Error::Parse {
                pos,
                msg: "exponent must be an integer literal".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Parse {
                pos,
                msg: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse {
                        pos: self.here(),
                        msg: "expected `)`".into(),
                    });
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                if let Some(f) = func {
                    if !self.eat('(') {
                        return Err(Error::Parse {
                            pos: self.here(),
                            msg: format!("expected `(` after `{name}`"),
                        });
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(Error::Parse {
                            pos: self.here(),
                            msg: "expected `)`".into(),
                        });
                    }
                    return Ok(Expr::Call(f, b(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                if let Some(k) = name.strip_prefix('e').and_then(|d| d.parse::<usize>().ok()) {
                    if k == 0 {
                        return Err(Error::Parse {
                            pos,
                            msg: "basis atoms start at e1".into(),
                        });
                    }
                    return Ok(Expr::Basis(k - 1));
                }
                Ok(Expr::Var(name))
            }
            Tok::Op(c) => Err(Error::Parse {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_curve() {
        let e = Expr::parse("sin(t)*e1 + 0.5*e3").unwrap();
        let v = e.eval_vector(&[("t", 0.3)], 3).unwrap();
        assert_eq!(v.as_slice(), &[0.3f64.sin(), 0.0, 0.5]);
        assert_eq!(e.basis_extent(), 3);
        assert_eq!(e.variables().into_iter().collect::<Vec<_>>(), vec!["t"]);
    }

    #[test]
    fn precedence_and_powers() {
        let e = Expr::parse("-2^2 + 3*t^-1 - (1 - t)/2").unwrap();
        let t = 0.5;
        let want = -4.0 + 3.0 / t - (1.0 - t) / 2.0;
        assert_eq!(e.eval_scalar(&[("t", t)]).unwrap(), want);
        assert_eq!(Expr::parse("1e-3*2").unwrap().eval_scalar(&[]).unwrap(), 2e-3);
    }

    #[test]
    fn typing_errors() {
        assert!(Expr::parse("e1*e2").unwrap().eval(&[], 2).is_err());
        assert!(Expr::parse("e1 + 1").unwrap().eval(&[], 2).is_err());
        assert!(Expr::parse("e4").unwrap().eval(&[], 3).is_err());
        assert!(Expr::parse("sin(e1)").unwrap().eval(&[], 3).is_err());
        assert!(Expr::parse("x").unwrap().eval(&[], 3).is_err());
        assert!(Expr::parse("0").unwrap().eval_vector(&[], 3).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn parse_errors_report_positions() {
        for (src, pos) in [("1 +", 3), ("sin t", 4), ("2 $ 3", 2), ("(1", 2), ("t^x", 2)] {
            match Expr::parse(src) {
                Err(Error::Parse { pos: p, .. }) => assert_eq!(p, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn symbolic_derivative_matches_central_differences() {
        let e = Expr::parse("x^3*sin(y) + exp(x*y)/(1 + x^2) - cos(2*x)").unwrap();
        let dx = e.diff("x");
        let dy = e.diff("y");
        let (x, y) = (0.7, -0.3);
        let f = |x: f64, y: f64| e.eval_scalar(&[("x", x), ("y", y)]).unwrap();
        let h = 1e-5;
        let fdx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
        let fdy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
        assert!((dx.eval_scalar(&[("x", x), ("y", y)]).unwrap() - fdx).abs() < 1e-8);
        assert!((dy.eval_scalar(&[("x", x), ("y", y)]).unwrap() - fdy).abs() < 1e-8);
    }

    #[test]
    fn derivative_of_vector_expression() {
        let e = Expr::parse("x*y*e1 + x^2*e2").unwrap();
        let d = e.diff("x");
        let v = d.eval_vector(&[("x", 2.0), ("y", 3.0)], 2).unwrap();
        assert_eq!(v.as_slice(), &[3.0, 4.0]);
        assert_eq!(Expr::parse("5*e1").unwrap().diff("x"), Expr::Num(0.0));
    }
}
