//! The element expression language shared by the CLI and the examples.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '.' | '/') unary)*
//! unary := '-' unary | '~' unary | power
//! power := atom ('^' INT)?
//! atom  := INT | name | 'inv' '(' expr (',' 'N' '=' INT)? ')' | '(' expr ')'
//!        | '[' '[' expr, … ']' , … ']'
//! ```
//!
//! Names resolve to vertices, then edges, then `x_<class>` variables.
//! Values live in the smallest algebra that holds them: scalars, the path
//! algebra, rational series, the Leavitt algebra, or `Q`.

use num_bigint::BigInt;
use thiserror::Error;

use crate::leavitt::LeavittElement;
use crate::pathalg::{AlgMatrix, PathElement};
use crate::qalg::{QAlgebra, QElement};
use crate::ratseries::{invert_element, rep_add, rep_mul, rep_neg, LinRep};
use crate::scalars::RatFn;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("evaluation error at {pos}: {msg}")]
pub struct EvalError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < cs.len() {
        let (pos, c) = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < cs.len() && cs[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = cs.get(j).map_or(src.len(), |x| x.0);
            out.push((pos, Tok::Int(src[pos..end].parse().expect("digits"))));
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < cs.len() && (cs[j].1.is_alphanumeric() || cs[j].1 == '_' || cs[j].1 == '\'') {
                j += 1;
            }
            let end = cs.get(j).map_or(src.len(), |x| x.0);
            out.push((pos, Tok::Name(src[pos..end].to_string())));
            i = j;
        } else if "+-*/.^~()[],=".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// Parsed expression tree; every node keeps its byte offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(usize, BigInt),
    Name(usize, String),
    Neg(usize, Box<Expr>),
    Star(usize, Box<Expr>),
    Add(usize, Box<Expr>, Box<Expr>),
    Sub(usize, Box<Expr>, Box<Expr>),
    Mul(usize, Box<Expr>, Box<Expr>),
    Div(usize, Box<Expr>, Box<Expr>),
    Pow(usize, Box<Expr>, u32),
    Inv(usize, Box<Expr>, Option<usize>),
    Matrix(usize, Vec<Vec<Expr>>),
}

impl Expr {
    pub fn pos(&self) -> usize {
        match self {
            Expr::Int(p, _)
            | Expr::Name(p, _)
            | Expr::Neg(p, _)
            | Expr::Star(p, _)
            | Expr::Add(p, ..)
            | Expr::Sub(p, ..)
            | Expr::Mul(p, ..)
            | Expr::Div(p, ..)
            | Expr::Pow(p, ..)
            | Expr::Inv(p, ..)
            | Expr::Matrix(p, _) => *p,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            if self.eat('+') {
                lhs = Expr::Add(pos, Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(pos, Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            if self.eat('*') || self.eat('.') {
                lhs = Expr::Mul(pos, Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(pos, Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        if self.eat('-') {
            return Ok(Expr::Neg(pos, Box::new(self.unary()?)));
        }
        if self.eat('~') {
            return Ok(Expr::Star(pos, Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        let pos = self.pos();
        if self.eat('^') {
            let k = self.small_int()?;
            return Ok(Expr::Pow(pos, Box::new(base), k as u32));
        }
        Ok(base)
    }

    fn small_int(&mut self) -> Result<usize, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                let k = usize::try_from(&n).ok().filter(|&k| k <= 64);
                match k {
                    Some(k) => {
                        self.at += 1;
                        Ok(k)
                    }
                    None => self.err("integer out of range"),
                }
            }
            _ => self.err("expected an integer"),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Expr::Int(pos, n))
            }
            Some(Tok::Name(s)) if s == "inv" && self.toks.get(self.at + 1).map(|t| &t.1) == Some(&Tok::Sym('(')) => {
                self.at += 2;
                let arg = self.expr()?;
                let mut n = None;
                if self.eat(',') {
                    match self.peek() {
                        Some(Tok::Name(k)) if k == "N" => self.at += 1,
                        _ => return self.err("expected `N=`"),
                    }
                    self.expect('=')?;
                    n = Some(self.small_int()?);
                }
                self.expect(')')?;
                Ok(Expr::Inv(pos, Box::new(arg), n))
            }
            Some(Tok::Name(s)) => {
                self.at += 1;
                Ok(Expr::Name(pos, s))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Sym('[')) => {
                self.at += 1;
                let mut rows = Vec::new();
                loop {
                    self.expect('[')?;
                    let mut row = vec![self.expr()?];
                    while self.eat(',') {
                        row.push(self.expr()?);
                    }
                    self.expect(']')?;
                    rows.push(row);
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(']')?;
                Ok(Expr::Matrix(pos, rows))
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0, end: src.len() };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// The value of an expression, in the smallest algebra containing it.
#[derive(Clone, Debug)]
pub enum Value {
    Scalar(RatFn),
    Path(PathElement),
    Rational(LinRep),
    Leavitt(LeavittElement),
    Q(QElement),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Path(_) => "path",
            Value::Rational(_) => "rational",
            Value::Leavitt(_) => "leavitt",
            Value::Q(_) => "q",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Scalar(_) => 0,
            Value::Path(_) => 1,
            Value::Rational(_) | Value::Leavitt(_) => 2,
            Value::Q(_) => 3,
        }
    }
}

/// Evaluates expressions over a fixed graph.
pub struct Evaluator<'a> {
    q: &'a QAlgebra,
}

type EvalResult<T> = Result<T, ExprError>;

fn at(pos: usize) -> impl Fn(String) -> ExprError {
    move |msg| ExprError::Eval(EvalError { pos, msg })
}

impl<'a> Evaluator<'a> {
    pub fn new(q: &'a QAlgebra) -> Self {
        Evaluator { q }
    }

    pub fn algebra(&self) -> &QAlgebra {
        self.q
    }

    pub fn eval_str(&self, src: &str) -> EvalResult<Value> {
        self.eval(&parse_expr(src)?)
    }

    /// Promotes a value by one or more steps so that it has at least `rank`.
    fn lift(&self, v: Value, target: u8, both_mid: bool) -> Value {
        let base = self.q.base();
        match (v, target) {
            (v, t) if v.rank() >= t && !(both_mid && v.rank() == 2) => v,
            (Value::Scalar(c), t) => {
                let one = base.one().scale_raw(&c);
                self.lift(Value::Path(one), t, both_mid)
            }
            (Value::Path(a), 2) => Value::Rational(LinRep::constant(base, a)),
            (Value::Path(a), _) => Value::Q(self.q.from_path_element(&a)),
            (Value::Rational(r), _) => Value::Q(self.q.from_series(&r)),
            (Value::Leavitt(x), _) => Value::Q(self.q.from_leavitt(&x)),
            (v, _) => v,
        }
    }

    /// Brings two operands to a common algebra.
    fn unify(&self, a: Value, b: Value) -> (Value, Value) {
        let mixed_mid = matches!(
            (&a, &b),
            (Value::Rational(_), Value::Leavitt(_)) | (Value::Leavitt(_), Value::Rational(_))
        );
        if mixed_mid {
            return (self.lift(a, 3, true), self.lift(b, 3, true));
        }
        let t = a.rank().max(b.rank());
        // a path element meeting a Leavitt element goes to Leavitt, not to series
        let lift_to = |v: Value, other: &Value| match (&v, other) {
            (Value::Path(p), Value::Leavitt(_)) => Value::Leavitt(self.q.leavitt().from_path_element(p)),
            (Value::Scalar(c), Value::Leavitt(_)) => {
                Value::Leavitt(self.q.leavitt().from_path_element(&self.q.base().one().scale_raw(c)))
            }
            _ => self.lift(v, t, false),
        };
        let a2 = lift_to(a, &b);
        let b2 = lift_to(b, &a2);
        (a2, b2)
    }

    fn scale(&self, c: &RatFn, v: Value, pos: usize) -> EvalResult<Value> {
        let base = self.q.base();
        let e = at(pos);
        Ok(match v {
            Value::Scalar(d) => Value::Scalar(c * &d),
            Value::Path(a) => Value::Path(base.scale(c, &a).map_err(|x| e(x.to_string()))?),
            Value::Leavitt(x) => Value::Leavitt(self.q.leavitt().scale(c, &x).map_err(|x| e(x.to_string()))?),
            Value::Rational(r) => Value::Rational(self.scale_rep(c, &r).map_err(&e)?),
            Value::Q(x) => {
                let mut out = QElement::zero();
                for (g, r) in x.terms() {
                    out.add_term(g.clone(), self.scale_rep(c, r).map_err(&e)?);
                }
                Value::Q(out)
            }
        })
    }

    fn scale_rep(&self, c: &RatFn, r: &LinRep) -> Result<LinRep, String> {
        let base = self.q.base();
        let lambda = r.lambda().clone();
        let mut scaled = Vec::with_capacity(lambda.cols());
        for j in 0..lambda.cols() {
            scaled.push(base.scale(c, lambda.get(0, j)).map_err(|x| x.to_string())?);
        }
        let lambda = AlgMatrix::from_rows(vec![scaled]).map_err(|x| x.to_string())?;
        LinRep::new(lambda, r.trans().clone(), r.rho().clone()).map_err(|x| x.to_string())
    }

    fn add(&self, a: Value, b: Value) -> Value {
        match self.unify(a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(&x + &y),
            (Value::Path(x), Value::Path(y)) => Value::Path(x.add(&y)),
            (Value::Rational(x), Value::Rational(y)) => Value::Rational(rep_add(&x, &y)),
            (Value::Leavitt(x), Value::Leavitt(y)) => Value::Leavitt(x.add(&y)),
            (Value::Q(x), Value::Q(y)) => Value::Q(x.add(&y)),
            _ => unreachable!("unify returns matching kinds"),
        }
    }

    fn neg(&self, a: Value) -> Value {
        match a {
            Value::Scalar(x) => Value::Scalar(-&x),
            Value::Path(x) => Value::Path(x.neg()),
            Value::Rational(x) => Value::Rational(rep_neg(&x)),
            Value::Leavitt(x) => Value::Leavitt(x.neg()),
            Value::Q(x) => Value::Q(x.neg()),
        }
    }

    fn mul(&self, a: Value, b: Value, pos: usize) -> EvalResult<Value> {
        match (a, b) {
            (Value::Scalar(c), Value::Scalar(d)) => Ok(Value::Scalar(&c * &d)),
            (Value::Scalar(c), v) | (v, Value::Scalar(c)) => self.scale(&c, v, pos),
            (a, b) => Ok(match self.unify(a, b) {
                (Value::Path(x), Value::Path(y)) => Value::Path(self.q.base().mul(&x, &y)),
                (Value::Rational(x), Value::Rational(y)) => Value::Rational(rep_mul(&x, &y)),
                (Value::Leavitt(x), Value::Leavitt(y)) => Value::Leavitt(self.q.leavitt().mul(&x, &y)),
                (Value::Q(x), Value::Q(y)) => Value::Q(self.q.mul(&x, &y).map_err(|x| at(pos)(x.to_string()))?),
                _ => unreachable!("unify returns matching kinds"),
            }),
        }
    }

    fn name(&self, pos: usize, s: &str) -> EvalResult<Value> {
        let base = self.q.base();
        let quiver = base.quiver();
        if let Ok(v) = quiver.vertex(s) {
            return Ok(Value::Path(base.vertex(v)));
        }
        if let Ok(e) = quiver.edge(s) {
            return Ok(Value::Path(base.edge(e)));
        }
        if let Some(class) = s.strip_prefix("x_") {
            if let Some(i) = base.tower().class_by_name(class) {
                return Ok(Value::Scalar(base.tower().var(i).value().clone()));
            }
        }
        Err(ParseError { pos, msg: format!("unknown name `{s}`") }.into())
    }

    pub fn eval(&self, e: &Expr) -> EvalResult<Value> {
        match e {
            Expr::Int(_, n) => Ok(Value::Scalar(RatFn::from_bigint(n.clone()))),
            Expr::Name(pos, s) => self.name(*pos, s),
            Expr::Neg(_, a) => Ok(self.neg(self.eval(a)?)),
            Expr::Star(pos, a) => match self.eval(a)? {
                Value::Scalar(c) => Ok(Value::Scalar(c)),
                Value::Path(x) => Ok(Value::Leavitt(self.q.leavitt().from_path_element(&x).star())),
                Value::Leavitt(x) => Ok(Value::Leavitt(x.star())),
                v => Err(at(*pos)(format!("no involution on {} values", v.kind()))),
            },
            Expr::Add(_, a, b) => Ok(self.add(self.eval(a)?, self.eval(b)?)),
            Expr::Sub(_, a, b) => {
                let b = self.neg(self.eval(b)?);
                Ok(self.add(self.eval(a)?, b))
            }
            Expr::Mul(pos, a, b) => self.mul(self.eval(a)?, self.eval(b)?, *pos),
            Expr::Div(pos, a, b) => match self.eval(b)? {
                Value::Scalar(d) => {
                    let inv = d.inv().ok_or_else(|| at(*pos)("division by zero".into()))?;
                    self.mul(self.eval(a)?, Value::Scalar(inv), *pos)
                }
                v => Err(at(*pos)(format!("cannot divide by a {} value", v.kind()))),
            },
            Expr::Pow(pos, a, k) => {
                let base = self.eval(a)?;
                if let Value::Scalar(c) = &base {
                    return Ok(Value::Scalar(c.pow(*k)));
                }
                let mut out = self.lift(Value::Scalar(RatFn::one()), base.rank(), false);
                if let Value::Leavitt(_) = base {
                    out = Value::Leavitt(self.q.leavitt().one());
                }
                for _ in 0..*k {
                    out = self.mul(out, base.clone(), *pos)?;
                }
                Ok(out)
            }
            Expr::Inv(pos, a, _) => match self.eval(a)? {
                Value::Scalar(c) => c
                    .inv()
                    .map(Value::Scalar)
                    .ok_or_else(|| at(*pos)("division by zero".into())),
                Value::Path(p) => invert_element(self.q.base(), &p)
                    .map(Value::Rational)
                    .map_err(|x| at(*pos)(x.to_string())),
                v => Err(at(*pos)(format!("inv expects a path-algebra element, got a {} value", v.kind()))),
            },
            Expr::Matrix(pos, _) => Err(at(*pos)("matrix literal in element position".into())),
        }
    }

    /// Evaluates a matrix literal whose entries are path-algebra elements.
    pub fn eval_matrix(&self, e: &Expr) -> EvalResult<AlgMatrix> {
        let Expr::Matrix(pos, rows) = e else {
            return Err(at(e.pos())("expected a matrix literal `[[a, b], [c, d]]`".into()));
        };
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            let mut r = Vec::with_capacity(row.len());
            for x in row {
                r.push(self.path_element(x)?);
            }
            out.push(r);
        }
        AlgMatrix::from_rows(out).map_err(|x| at(*pos)(x.to_string()))
    }

    /// Evaluates an expression that must land in the path algebra.
    pub fn path_element(&self, e: &Expr) -> EvalResult<PathElement> {
        match self.eval(e)? {
            Value::Scalar(c) => Ok(self.q.base().one().scale_raw(&c)),
            Value::Path(p) => Ok(p),
            v => Err(at(e.pos())(format!("expected a path-algebra element, got a {} value", v.kind()))),
        }
    }

    /// Normal form, with series truncated at degree `n`.
    pub fn display(&self, v: &Value, n: usize) -> String {
        let base = self.q.base();
        match v {
            Value::Scalar(c) => base.tower().display(c),
            Value::Path(a) => base.display(a),
            Value::Leavitt(x) => self.q.leavitt().display(x),
            Value::Rational(r) => self.q.display(&self.q.from_series(r), n),
            Value::Q(x) => self.q.display(x, n),
        }
    }

    /// The degree requested by an outermost `inv(…, N=k)`, if any.
    pub fn requested_degree(e: &Expr) -> Option<usize> {
        match e {
            Expr::Inv(_, _, n) => *n,
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathalg::PathAlgebra;
    use crate::quiver::samples;

    fn q_of(g: crate::quiver::GraphFile) -> QAlgebra {
        QAlgebra::new(PathAlgebra::from_graph(&g).unwrap())
    }

    fn show(q: &QAlgebra, src: &str, n: usize) -> String {
        let ev = Evaluator::new(q);
        let v = ev.eval_str(src).unwrap();
        ev.display(&v, n)
    }

    #[test]
    fn ck1_reduces_to_the_range() {
        let q = q_of(samples::rose2());
        assert_eq!(show(&q, "~e1 . e1", 8), "w");
        assert_eq!(show(&q, "~e1 . e2", 8), "0");
    }

    #[test]
    fn ck2_normal_form() {
        let q = q_of(samples::rose2());
        assert_eq!(show(&q, "e2 . ~e2", 8), "w - e1.~e1");
    }

    #[test]
    fn path_literals() {
        let q = q_of(samples::toeplitz());
        assert_eq!(show(&q, "(x_u)*alpha.f + 2*v", 8), "2*v + x_u*alpha.f");
        assert_eq!(show(&q, "alpha^2 - alpha.alpha", 8), "0");
    }

    #[test]
    fn geometric_inverse() {
        let q = q_of(samples::toeplitz());
        let s = show(&q, "inv(1 - x_u*alpha, N=3)", 3);
        assert!(s.starts_with("u + v + x_u*alpha"), "{s}");
        assert!(s.contains("x_u^3*alpha.alpha.alpha"), "{s}");
        assert!(s.ends_with('…'), "{s}");
    }

    #[test]
    fn series_times_ghost_lands_in_q() {
        let q = q_of(samples::toeplitz());
        let ev = Evaluator::new(&q);
        let v = ev.eval_str("inv(1 - alpha) . ~alpha").unwrap();
        assert_eq!(v.kind(), "q");
    }

    #[test]
    fn membership_is_enforced() {
        let q = q_of(samples::toeplitz());
        let ev = Evaluator::new(&q);
        // x_v ∉ K_u, and `alpha` has coefficients in K_u
        assert!(matches!(ev.eval_str("x_v*alpha"), Err(ExprError::Eval(_))));
        assert!(ev.eval_str("x_v*beta").is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        let q = q_of(samples::toeplitz());
        let ev = Evaluator::new(&q);
        match ev.eval_str("alpha + gamma") {
            Err(ExprError::Parse(e)) => assert_eq!(e.pos, 8),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_expr("alpha +").unwrap_err().pos, 7);
        assert_eq!(parse_expr("alpha $").unwrap_err().pos, 6);
    }

    #[test]
    fn matrix_literals() {
        let q = q_of(samples::toeplitz());
        let ev = Evaluator::new(&q);
        let m = ev.eval_matrix(&parse_expr("[[1 - alpha, f], [0, 1]]").unwrap()).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert!(m.is_invertible(q.base()).unwrap());
    }
}
