//! A small expression language for graph functions `f(u, v)`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'u' | 'v' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := sqrt | sinh | cosh | tanh | sin | cos | exp | log | abs
//! ```
//!
//! Whitespace is ignored. Evaluation is generic over [`Taylor`] so the same
//! tree yields values, gradients and Hessians.

use std::fmt;

use super::taylor::Taylor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A parsed graph function `f(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphExpr {
    source: String,
    ast: Expr,
}

impl GraphExpr {
    pub fn parse(text: &str) -> Result<Self> {
        let ast = Parser::new(text).parse_all()?;
        Ok(GraphExpr { source: text.to_string(), ast })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn depth(&self) -> usize {
        self.ast.depth()
    }

    /// Evaluates with series arguments; errors on leaving the real domain.
    pub fn eval(&self, u: Taylor, v: Taylor) -> Result<Taylor> {
        let out = self.ast.eval(u, v)?;
        if !out.is_finite() {
            return Err(Error::Domain(format!("`{}` is not finite here", self.source)));
        }
        Ok(out)
    }

    pub fn eval_f64(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.eval(Taylor::var_u(u, 0), Taylor::var_v(v, 0))?.value())
    }

    /// Value, gradient and Hessian at `(u, v)`.
    pub fn jet(&self, u: f64, v: f64) -> Result<Taylor> {
        self.eval(Taylor::var_u(u, 2), Taylor::var_v(v, 2))
    }
}

/// Parses `text` into an expression.
pub fn parse_graph_expr(text: &str) -> Result<GraphExpr> {
    GraphExpr::parse(text)
}

impl fmt::Display for GraphExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

impl Expr {
    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Const(_) => 0,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn is_constant(t: &Taylor) -> bool {
        (1..=t.order()).all(|d| (0..=d).all(|j| t.coeff(d - j, j) == 0.0))
    }

    fn eval(&self, u: Taylor, v: Taylor) -> Result<Taylor> {
        Ok(match self {
            Expr::Num(x) => Taylor::constant(*x),
            Expr::Var(Var::U) => u,
            Expr::Var(Var::V) => v,
            Expr::Const(Constant::Pi) => Taylor::constant(std::f64::consts::PI),
            Expr::Const(Constant::E) => Taylor::constant(std::f64::consts::E),
            Expr::Neg(a) => -a.eval(u, v)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval(u, v)?;
                let y = b.eval(u, v)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.value() == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        let p = y.value();
                        let integral = Self::is_constant(&y) && p.fract() == 0.0 && p.abs() <= 64.0;
                        if integral {
                            if p < 0.0 && x.value() == 0.0 {
                                return Err(Error::Domain("zero raised to a negative power".into()));
                            }
                            x.powi(p as i32)
                        } else if x.value() > 0.0 {
                            if Self::is_constant(&y) {
                                x.powf(p)
                            } else {
                                (y * x.ln()).exp()
                            }
                        } else {
                            return Err(Error::Domain(format!("non-integer power of non-positive base {}", x.value())));
                        }
                    }
                }
            }
            Expr::Call(func, a) => {
                let x = a.eval(u, v)?;
                let a0 = x.value();
                let smooth = x.order() == 0;
                match func {
                    Func::Sqrt => {
                        if a0 < 0.0 || (a0 == 0.0 && !smooth) {
                            return Err(Error::Domain(format!("sqrt of {a0}")));
                        }
                        if a0 == 0.0 {
                            Taylor::constant(0.0).truncate(x.order())
                        } else {
                            x.sqrt()
                        }
                    }
                    Func::Log => {
                        if a0 <= 0.0 {
                            return Err(Error::Domain(format!("log of {a0}")));
                        }
                        x.ln()
                    }
                    Func::Abs => {
                        if a0 == 0.0 && !smooth {
                            return Err(Error::Domain("abs is not differentiable at 0".into()));
                        }
                        x.abs()
                    }
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool| {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Var(Var::U) => f.write_str("u"),
            Expr::Var(Var::V) => f.write_str("v"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                if *op == BinOp::Pow {
                    // right-associative: the base needs parens at equal
                    // precedence, the exponent does not
                    wrap(f, a, a.precedence() <= p)?;
                    write!(f, " ^ ")?;
                    wrap(f, b, b.precedence() < 3)
                } else {
                    wrap(f, a, a.precedence() < p)?;
                    write!(f, " {} ", op.symbol())?;
                    wrap(f, b, b.precedence() <= p)
                }
            }
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

fn describe(t: &Token) -> String {
    match t {
        Token::Num(x) => format!("number {x}"),
        Token::Ident(s) => format!("`{s}`"),
        Token::Op(c) => format!("`{c}`"),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::End => "end of input".into(),
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    tok: Token,
    tok_start: usize,
}

const PRIMARY_EXPECTED: &str = "one of: number, u, v, pi, e, function name, `(`, `-`";

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, pos: 0, tok: Token::End, tok_start: 0 }
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse { offset: self.tok_start, expected: expected.to_string(), found: describe(&self.tok) }
    }

    fn advance(&mut self) -> Result<()> {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Token::End;
            return Ok(());
        }
        let c = bytes[self.pos];
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                self.pos += 1;
            }
            if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                // exponent only if followed by digits (otherwise `e` is the constant)
                let mut k = self.pos + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    self.pos = k;
                }
            }
            let lit = &self.text[start..self.pos];
            let val: f64 = lit.parse().map_err(|_| Error::Parse {
                offset: start,
                expected: "a numeric literal".into(),
                found: format!("`{lit}`"),
            })?;
            self.tok = Token::Num(val);
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Token::Ident(self.text[start..self.pos].to_string());
        } else {
            self.pos += 1;
            self.tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Token::Op(c as char),
                b'(' => Token::LParen,
                b')' => Token::RParen,
                _ => {
                    let ch = self.text[self.tok_start..].chars().next().unwrap();
                    self.pos = self.tok_start + ch.len_utf8();
                    return Err(Error::Parse {
                        offset: self.tok_start,
                        expected: "an operator, parenthesis, number or identifier".into(),
                        found: format!("`{ch}`"),
                    });
                }
            };
        }
        Ok(())
    }

    fn parse_all(mut self) -> Result<Expr> {
        self.advance()?;
        let e = self.expr()?;
        if self.tok != Token::End {
            return Err(self.error("one of: `+`, `-`, `*`, `/`, `^`, end of input"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Token::Op(c @ ('+' | '-')) = self.tok {
            self.advance()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Token::Op(c @ ('*' | '/')) = self.tok {
            self.advance()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.tok == Token::Op('-') {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.tok == Token::Op('^') {
            self.advance()?;
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.tok.clone() {
            Token::Num(x) => {
                self.advance()?;
                Ok(Expr::Num(x))
            }
            Token::LParen => {
                self.advance()?;
                let e = self.expr()?;
                if self.tok != Token::RParen {
                    return Err(self.error("`)`"));
                }
                self.advance()?;
                Ok(e)
            }
            Token::Ident(name) => {
                let leaf = match name.as_str() {
                    "u" => Some(Expr::Var(Var::U)),
                    "v" => Some(Expr::Var(Var::V)),
                    "pi" => Some(Expr::Const(Constant::Pi)),
                    "e" => Some(Expr::Const(Constant::E)),
                    _ => None,
                };
                if let Some(leaf) = leaf {
                    self.advance()?;
                    return Ok(leaf);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(self.error("a variable (u, v), constant (pi, e) or function name"));
                };
                self.advance()?;
                if self.tok != Token::LParen {
                    return Err(self.error("`(` after function name"));
                }
                self.advance()?;
                let arg = self.expr()?;
                if self.tok != Token::RParen {
                    return Err(self.error("`)`"));
                }
                self.advance()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => Err(self.error(PRIMARY_EXPECTED)),
        }
    }
}
