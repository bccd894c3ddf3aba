//! A small expression language for user-supplied energies `W(I1, I2, I3)`.
//!
//! ```text
//! expr    := term (("+"|"-") term)*
//! term    := factor (("*"|"/") factor)*
//! factor  := unary ("^" factor)?
//! unary   := "-" unary | primary
//! primary := number | ident | ident "(" expr ")" | "(" expr ")"
//! ```
//!
//! `exp`, `log` and `sqrt` are the only functions; `I1`, `I2`, `I3` are the
//! invariants and every other identifier is a parameter looked up in a
//! [`ParamTable`]. Expressions evaluate over anything implementing
//! [`Scalar`], so the same tree yields plain values or second-order jets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diff::Scalar;
use crate::error::{Error, Result};

/// Named real parameters, e.g. `mu`, `alpha`, `kappa`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamTable {
    entries: Vec<(String, f64)>,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ParamTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut t = ParamTable::new();
        for (k, v) in pairs {
            if t.get(k).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate parameter `{k}`")));
            }
            t.set(k, v)?;
        }
        Ok(t)
    }

    /// Inserts or overwrites a binding.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !is_identifier(name) {
            return Err(Error::InvalidArgument(format!(
                "`{name}` is not a valid parameter name"
            )));
        }
        match self.entries.iter_mut().find(|(k, _)| k == name) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((name.to_string(), value)),
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }

    /// Value of a parameter that the caller knows to be present.
    ///
    /// # Panics
    /// If the parameter is missing.
    pub fn value(&self, name: &str) -> f64 {
        self.get(name)
            .unwrap_or_else(|| panic!("parameter `{name}` missing from table"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `name=value`.
    pub fn parse_binding(binding: &str) -> Result<(String, f64)> {
        let (k, v) = binding.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("expected name=value, got `{binding}`"))
        })?;
        let k = k.trim();
        if !is_identifier(k) {
            return Err(Error::InvalidArgument(format!(
                "`{k}` is not a valid parameter name"
            )));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("`{v}` is not a number")))?;
        Ok((k.to_string(), v))
    }
}

impl fmt::Display for ParamTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    I1,
    I2,
    I3,
}

impl Invariant {
    fn index(self) -> usize {
        match self {
            Invariant::I1 => 0,
            Invariant::I2 => 1,
            Invariant::I3 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Const(f64),
    Var(Invariant),
    Param(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

/// Expression tree node with the byte offset of its source text.
///
/// Equality is structural and ignores offsets.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub offset: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Const(a), ExprKind::Const(b)) => a == b,
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Param(a), ExprKind::Param(b)) => a == b,
            (ExprKind::Unary(o1, a), ExprKind::Unary(o2, b)) => o1 == o2 && a == b,
            (ExprKind::Binary(o1, a1, b1), ExprKind::Binary(o2, a2, b2)) => {
                o1 == o2 && a1 == a2 && b1 == b2
            }
            _ => false,
        }
    }
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr {
            kind: ExprKind::Const(v),
            offset: 0,
        }
    }

    pub fn var(v: Invariant) -> Expr {
        Expr {
            kind: ExprKind::Var(v),
            offset: 0,
        }
    }

    pub fn param(name: &str) -> Expr {
        Expr {
            kind: ExprKind::Param(name.to_string()),
            offset: 0,
        }
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Expr {
        Expr {
            kind: ExprKind::Unary(op, Box::new(e)),
            offset: 0,
        }
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr {
            kind: ExprKind::Binary(op, Box::new(a), Box::new(b)),
            offset: 0,
        }
    }

    /// Names of all parameters referenced by the expression.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            ExprKind::Param(p) => {
                out.insert(p.clone());
            }
            ExprKind::Unary(_, a) => a.collect_params(out),
            ExprKind::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            _ => {}
        }
    }

    /// Whether the expression mentions the given invariant.
    pub fn uses(&self, v: Invariant) -> bool {
        match &self.kind {
            ExprKind::Var(w) => *w == v,
            ExprKind::Unary(_, a) => a.uses(v),
            ExprKind::Binary(_, a, b) => a.uses(v) || b.uses(v),
            _ => false,
        }
    }

    /// Evaluates the expression with the invariants bound to `vars`.
    pub fn eval<S: Scalar>(&self, vars: &[S; 3], params: &ParamTable) -> Result<S> {
        let located = |e: Error| Error::Expression {
            offset: self.offset,
            source: Box::new(e),
        };
        match &self.kind {
            ExprKind::Const(c) => Ok(S::from_f64(*c)),
            ExprKind::Var(v) => Ok(vars[v.index()]),
            ExprKind::Param(p) => params
                .get(p)
                .map(S::from_f64)
                .ok_or_else(|| Error::UnboundParameter(p.clone())),
            ExprKind::Unary(op, a) => {
                let x = a.eval(vars, params)?;
                match op {
                    UnaryOp::Neg => Ok(-x),
                    UnaryOp::Exp => x.checked_exp().map_err(located),
                    UnaryOp::Log => x.checked_ln().map_err(located),
                    UnaryOp::Sqrt => x.checked_sqrt().map_err(located),
                }
            }
            ExprKind::Binary(op, a, b) => {
                let x = a.eval(vars, params)?;
                let y = b.eval(vars, params)?;
                match op {
                    BinaryOp::Add => Ok(x + y),
                    BinaryOp::Sub => Ok(x - y),
                    BinaryOp::Mul => Ok(x * y),
                    BinaryOp::Div => x.checked_div(y).map_err(located),
                    BinaryOp::Pow => x.checked_pow(y).map_err(located),
                }
            }
        }
    }
}

/// Fully parenthesized rendering that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Const(c) => write!(f, "{c:?}"),
            ExprKind::Var(v) => write!(f, "{v:?}"),
            ExprKind::Param(p) => write!(f, "{p}"),
            ExprKind::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            ExprKind::Unary(UnaryOp::Exp, a) => write!(f, "exp({a})"),
            ExprKind::Unary(UnaryOp::Log, a) => write!(f, "log({a})"),
            ExprKind::Unary(UnaryOp::Sqrt, a) => write!(f, "sqrt({a})"),
            ExprKind::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Token, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next_token()?;
            let done = t.0 == Token::End;
            out.push(t);
            if done {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Token, usize)> {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Token::End, start));
        };
        match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Ok((Token::Op(c as char), start))
            }
            b'(' => {
                self.pos += 1;
                Ok((Token::LParen, start))
            }
            b')' => {
                self.pos += 1;
                Ok((Token::RParen, start))
            }
            b'0'..=b'9' | b'.' => self.number(start),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                Ok((Token::Ident(self.src[start..self.pos].to_string()), start))
            }
            _ => Err(Error::Parse {
                offset: start,
                message: format!(
                    "unexpected character `{}`",
                    self.src[start..].chars().next().unwrap_or('?')
                ),
            }),
        }
    }

    fn digits(&mut self) -> usize {
        let s = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        self.pos - s
    }

    fn number(&mut self, start: usize) -> Result<(Token, usize)> {
        let mut n = self.digits();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += self.digits();
        }
        if n == 0 {
            return Err(Error::Parse {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                // not an exponent after all
                self.pos = save;
                return Err(Error::Parse {
                    offset: save,
                    message: "malformed exponent".into(),
                });
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                offset: start,
                message: format!("number `{text}` out of range"),
            });
        }
        Ok((Token::Num(v), start))
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Token::Op(c @ ('+' | '-')) = *self.peek() {
            let (_, off) = self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset: off,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Token::Op(c @ ('*' | '/')) = *self.peek() {
            let (_, off) = self.bump();
            let rhs = self.factor()?;
            let op = if c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset: off,
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if *self.peek() == Token::Op('^') {
            let (_, off) = self.bump();
            let exponent = self.factor()?;
            return Ok(Expr {
                kind: ExprKind::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)),
                offset: off,
            });
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Token::Op('-') {
            let (_, off) = self.bump();
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Unary(UnaryOp::Neg, Box::new(inner)),
                offset: off,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.peek().clone() {
            Token::Num(v) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Const(v),
                    offset: off,
                })
            }
            Token::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Token::RParen {
                    return self.error("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Token::Ident(name) => {
                self.bump();
                let func = match name.as_str() {
                    "exp" => Some(UnaryOp::Exp),
                    "log" => Some(UnaryOp::Log),
                    "sqrt" => Some(UnaryOp::Sqrt),
                    _ => None,
                };
                if *self.peek() == Token::LParen {
                    let Some(op) = func else {
                        return Err(Error::Parse {
                            offset: off,
                            message: format!("unknown function `{name}`"),
                        });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Token::RParen {
                        return self.error("expected `)` after function argument");
                    }
                    self.bump();
                    return Ok(Expr {
                        kind: ExprKind::Unary(op, Box::new(arg)),
                        offset: off,
                    });
                }
                if func.is_some() {
                    return Err(Error::Parse {
                        offset: off,
                        message: format!("function `{name}` needs an argument"),
                    });
                }
                let kind = match name.as_str() {
                    "I1" => ExprKind::Var(Invariant::I1),
                    "I2" => ExprKind::Var(Invariant::I2),
                    "I3" => ExprKind::Var(Invariant::I3),
                    _ => ExprKind::Param(name),
                };
                Ok(Expr { kind, offset: off })
            }
            Token::RParen => self.error("unbalanced `)`"),
            Token::End => self.error("unexpected end of input"),
            Token::Op(c) => self.error(format!("unexpected operator `{c}`")),
        }
    }
}

/// Parses an expression.
pub fn parse(source: &str) -> Result<Expr> {
    if source.trim().is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let tokens = Lexer::tokens(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        Token::End => Ok(e),
        Token::RParen => p.error("unbalanced `)`"),
        _ => p.error("unexpected trailing input"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::{seed, Jet2};
    use proptest::prelude::*;

    fn c(v: f64) -> Expr {
        Expr::constant(v)
    }

    #[test]
    fn neo_hooke_shape() {
        let e = parse("mu/2*(I1 - 3)").unwrap();
        let expect = Expr::binary(
            BinaryOp::Mul,
            Expr::binary(BinaryOp::Div, Expr::param("mu"), c(2.0)),
            Expr::binary(BinaryOp::Sub, Expr::var(Invariant::I1), c(3.0)),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn function_call() {
        let e = parse("exp(k*(I1-3))").unwrap();
        match e.kind {
            ExprKind::Unary(UnaryOp::Exp, inner) => {
                assert!(matches!(inner.kind, ExprKind::Binary(BinaryOp::Mul, _, _)))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_are_positioned() {
        assert_eq!(
            parse("I1 +").unwrap_err(),
            Error::Parse {
                offset: 4,
                message: "unexpected end of input".into()
            }
        );
        assert!(matches!(parse("(I1 + 2"), Err(Error::Parse { offset: 7, .. })));
        assert!(matches!(parse("I1 + 2)"), Err(Error::Parse { offset: 6, .. })));
        assert!(matches!(parse("sin(I1)"), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse("I1 $ 2"), Err(Error::Parse { offset: 3, .. })));
        assert!(parse("").is_err());
        assert!(parse("1e").is_err());
    }

    #[test]
    fn power_is_right_associative_and_binds_over_product() {
        let e = parse("2^3^2").unwrap();
        let v: f64 = e.eval(&[0.0; 3], &ParamTable::new()).unwrap();
        assert_eq!(v, 512.0);
        let e = parse("2*3^2").unwrap();
        assert_eq!(e.eval(&[0.0; 3], &ParamTable::new()).unwrap(), 18.0);
        // a leading minus belongs to the base per the grammar
        let e = parse("-2^2").unwrap();
        assert_eq!(e.eval(&[0.0; 3], &ParamTable::new()).unwrap(), 4.0);
        let e = parse("I3^-1").unwrap();
        assert_eq!(e.eval(&[0.0, 0.0, 4.0], &ParamTable::new()).unwrap(), 0.25);
    }

    #[test]
    fn evaluation_examples() {
        let p = ParamTable::from_pairs([("mu", 2.0)]).unwrap();
        let e = parse("mu/2*(I1-3)").unwrap();
        assert_eq!(e.eval(&[4.0, 4.0, 1.0], &p).unwrap(), 1.0);
        let e = parse("I1*I3^(-1/3)").unwrap();
        assert_eq!(e.eval(&[3.0, 3.0, 1.0], &p).unwrap(), 3.0);
        let e = parse("mu/2*(I1 + 2/sqrt(I3) - 5)").unwrap();
        assert_eq!(e.eval(&[3.0, 3.0, 1.0], &p).unwrap(), 0.0);
    }

    #[test]
    fn errors_carry_location() {
        let e = parse("1 + log(I1 - 3)").unwrap();
        let err = e.eval(&[3.0, 3.0, 1.0], &ParamTable::new()).unwrap_err();
        match err {
            Error::Expression { offset, source } => {
                assert_eq!(offset, 4);
                assert!(matches!(*source, Error::Domain { op: "log", .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        let e = parse("mu*I1").unwrap();
        assert_eq!(
            e.eval(&[3.0, 3.0, 1.0], &ParamTable::new()).unwrap_err(),
            Error::UnboundParameter("mu".into())
        );
    }

    #[test]
    fn jets_differentiate_expressions() {
        let e = parse("I1^2*I2 + exp(I3)").unwrap();
        let vars = seed([2.0, 3.0, 0.5], 3).unwrap();
        let j: Jet2 = e.eval(&vars, &ParamTable::new()).unwrap();
        assert_eq!(j.d(0), 12.0);
        assert_eq!(j.d(1), 4.0);
        assert_eq!(j.hess(0, 1), 4.0);
        assert_eq!(j.hess(2, 2), 0.5f64.exp());
    }

    #[test]
    fn parameter_listing() {
        let e = parse("mu*(I1-3) + kappa*log(I3)^2 - mu").unwrap();
        let names: Vec<_> = e.parameters().into_iter().collect();
        assert_eq!(names, vec!["kappa".to_string(), "mu".to_string()]);
        assert!(e.uses(Invariant::I3));
        assert!(!e.uses(Invariant::I2));
    }

    #[test]
    fn param_table_rules() {
        assert!(ParamTable::from_pairs([("mu", 1.0), ("mu", 2.0)]).is_err());
        let mut t = ParamTable::new();
        assert!(t.set("2x", 1.0).is_err());
        t.set("mu", 1.0).unwrap();
        t.set("mu", 3.0).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get("mu"), Some(3.0));
        assert_eq!(
            ParamTable::parse_binding("alpha=0.95").unwrap(),
            ("alpha".to_string(), 0.95)
        );
        assert!(ParamTable::parse_binding("alpha").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::constant),
            prop_oneof![Just(Invariant::I1), Just(Invariant::I2), Just(Invariant::I3)]
                .prop_map(Expr::var),
            "[a-z][a-z0-9_]{0,4}"
                .prop_filter("reserved", |s| !matches!(s.as_str(), "exp" | "log" | "sqrt"))
                .prop_map(|s| Expr::param(&s)),
        ];
        leaf.prop_recursive(6, 48, 2, |inner| {
            prop_oneof![
                (
                    prop_oneof![
                        Just(UnaryOp::Neg),
                        Just(UnaryOp::Exp),
                        Just(UnaryOp::Log),
                        Just(UnaryOp::Sqrt)
                    ],
                    inner.clone()
                )
                    .prop_map(|(op, a)| Expr::unary(op, a)),
                (
                    prop_oneof![
                        Just(BinaryOp::Add),
                        Just(BinaryOp::Sub),
                        Just(BinaryOp::Mul),
                        Just(BinaryOp::Div),
                        Just(BinaryOp::Pow)
                    ],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(parse(&reparsed.to_string()).unwrap(), reparsed);
        }

        #[test]
        fn jet_value_slot_matches_real(i1 in 3.0f64..20.0, d in 0.0f64..5.0, i3 in 0.2f64..3.0) {
            let e = parse("mu/2*(I1*I3^(-1/3) - 3) + (1-mu)*log(I2)/sqrt(I3) + exp(0.1*(I1-3))^1.5").unwrap();
            let p = ParamTable::from_pairs([("mu", 0.7)]).unwrap();
            let x = [i1, i1 + d, i3];
            let real: f64 = e.eval(&x, &p).unwrap();
            let jet: Jet2 = e.eval(&seed(x, 3).unwrap(), &p).unwrap();
            prop_assert_eq!(real, jet.value());
        }
    }
}
