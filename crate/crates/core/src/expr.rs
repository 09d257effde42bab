//! Parser and evaluator for the user-supplied scalar expressions `f(u)` and
//! `h(t)`.
//!
//! Grammar (also shown in the CLI help):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?            # right-associative
//! atom   := NUMBER | 'u' | 't'
//!         | FUNC '(' expr (',' expr)* ')'
//!         | '(' expr ')'
//! NUMBER := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//! FUNC   := abs | exp | log | sqrt | sin | cos | min | max | pow
//! ```
//!
//! `min`, `max` and `pow` take two arguments, the other functions one. The
//! only variables are `u` and `t`; there is no implicit multiplication.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    T,
}

impl Var {
    pub fn name(&self) -> &'static str {
        match self {
            Var::U => "u",
            Var::T => "t",
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Min,
    Max,
    Pow,
}

impl Func {
    pub fn arity(&self) -> usize {
        match self {
            Func::Min | Func::Max | Func::Pow => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Min => "min",
            Func::Max => "max",
            Func::Pow => "pow",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return None,
        })
    }
}

/// Abstract syntax of a parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Variable(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{0}` has no binding")]
    Unbound(&'static str),
    #[error("{message} in `{subexpr}`")]
    Domain { message: String, subexpr: String },
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        (Tok::End, _) => Ok(e),
        (_, offset) => Err(ParseError {
            message: "unexpected trailing input".into(),
            offset,
        }),
    }
}

impl Expr {
    /// Evaluates with optional bindings for `u` and `t`.
    pub fn eval(&self, u: Option<f64>, t: Option<f64>) -> Result<f64, EvalError> {
        let domain = |message: &str, e: &Expr| EvalError::Domain {
            message: message.into(),
            subexpr: e.to_string(),
        };
        let v = match self {
            Expr::Number(v) => *v,
            Expr::Variable(Var::U) => u.ok_or(EvalError::Unbound("u"))?,
            Expr::Variable(Var::T) => t.ok_or(EvalError::Unbound("t"))?,
            Expr::Neg(x) => -x.eval(u, t)?,
            Expr::Binary(op, a, b) => {
                let x = a.eval(u, t)?;
                let y = b.eval(u, t)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain("division by zero", self));
                        }
                        x / y
                    }
                    BinOp::Pow => x.powf(y),
                }
            }
            Expr::Call(f, args) => {
                if args.len() != f.arity() {
                    return Err(domain(
                        &format!("`{}` takes {} argument(s)", f.name(), f.arity()),
                        self,
                    ));
                }
                let x = args[0].eval(u, t)?;
                match f {
                    Func::Abs => x.abs(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(domain("log of non-positive value", self));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain("sqrt of negative value", self));
                        }
                        x.sqrt()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Min => x.min(args[1].eval(u, t)?),
                    Func::Max => x.max(args[1].eval(u, t)?),
                    Func::Pow => x.powf(args[1].eval(u, t)?),
                }
            }
        };
        if v.is_nan() {
            return Err(domain("result is not a number", self));
        }
        Ok(v)
    }

    /// Which of the two variables appear in the tree: `(uses_u, uses_t)`.
    pub fn variables(&self) -> (bool, bool) {
        match self {
            Expr::Number(_) => (false, false),
            Expr::Variable(Var::U) => (true, false),
            Expr::Variable(Var::T) => (false, true),
            Expr::Neg(x) => x.variables(),
            Expr::Binary(_, a, b) => {
                let (au, at) = a.variables();
                let (bu, bt) = b.variables();
                (au || bu, at || bt)
            }
            Expr::Call(_, args) => args.iter().fold((false, false), |(cu, ct), a| {
                let (au, at) = a.variables();
                (cu || au, ct || at)
            }),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

/// Outcome of a sampling-based positivity check over one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub min_value: f64,
    pub min_at: f64,
    pub positive: bool,
    pub samples: usize,
}

/// Evaluates `e` at `samples` equispaced points of `[lo, hi]` binding `var`,
/// and reports the sampled minimum. A non-positive minimum is a warning for
/// the caller, not an error: the operator stays well defined, only the
/// theorem guarantees are voided.
pub fn check_positivity(
    e: &Expr,
    var: Var,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<PositivityReport, EvalError> {
    assert!(samples >= 2 && lo < hi, "need samples >= 2 and lo < hi");
    let mut min_value = f64::INFINITY;
    let mut min_at = lo;
    for k in 0..samples {
        let x = lo + (hi - lo) * (k as f64) / ((samples - 1) as f64);
        let v = match var {
            Var::U => e.eval(Some(x), None)?,
            Var::T => e.eval(None, Some(x))?,
        };
        if v < min_value {
            min_value = v;
            min_at = x;
        }
    }
    Ok(PositivityReport {
        min_value,
        min_at,
        positive: min_value > 0.0,
        samples,
    })
}

// ---------------------------------------------------------------------------
// printing

impl fmt::Display for Expr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Children are parenthesized exactly when re-parsing would otherwise
        // regroup them, so `parse(x.to_string()) == x`.
        fn child(out: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
            if e.precedence() < min_prec {
                write!(out, "({e})")
            } else {
                write!(out, "{e}")
            }
        }
        match self {
            Expr::Number(v) => write!(out, "{v}"),
            Expr::Variable(v) => write!(out, "{}", v.name()),
            Expr::Neg(x) => {
                write!(out, "-")?;
                child(out, x, 3)
            }
            Expr::Binary(op, a, b) => {
                let (sym, prec, spaced) = match op {
                    BinOp::Add => ("+", 1, true),
                    BinOp::Sub => ("-", 1, true),
                    BinOp::Mul => ("*", 2, false),
                    BinOp::Div => ("/", 2, false),
                    BinOp::Pow => ("^", 4, false),
                };
                // left-associative ops need strict parens on the right,
                // the right-associative `^` needs them on the left
                let (lmin, rmin) = if *op == BinOp::Pow {
                    (prec + 1, prec)
                } else {
                    (prec, prec + 1)
                };
                child(out, a, lmin)?;
                if spaced {
                    write!(out, " {sym} ")?;
                } else {
                    write!(out, "{sym}")?;
                }
                child(out, b, rmin)
            }
            Expr::Call(f, args) => {
                write!(out, "{}(", f.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ", ")?;
                    }
                    write!(out, "{a}")?;
                }
                write!(out, ")")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// tokenizer and parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '+' => toks.push((Tok::Plus, start)),
            '-' => toks.push((Tok::Minus, start)),
            '*' => toks.push((Tok::Star, start)),
            '/' => toks.push((Tok::Slash, start)),
            '^' => toks.push((Tok::Caret, start)),
            '(' => toks.push((Tok::LParen, start)),
            ')' => toks.push((Tok::RParen, start)),
            ',' => toks.push((Tok::Comma, start)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
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
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let v: f64 = text[start..i].parse().map_err(|_| ParseError {
                    message: format!("bad number literal `{}`", &text[start..i]),
                    offset: start,
                })?;
                toks.push((Tok::Number(v), start));
                continue;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(ParseError {
                    message: format!("unexpected character `{other}`"),
                    offset: start,
                })
            }
        }
        i += 1;
    }
    toks.push((Tok::End, text.len()));
    Ok(toks)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> (Tok, usize) {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    e = Expr::Binary(BinOp::Add, Box::new(e), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    e = Expr::Binary(BinOp::Sub, Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.factor()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    e = Expr::Binary(BinOp::Mul, Box::new(e), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    e = Expr::Binary(BinOp::Div, Box::new(e), Box::new(self.factor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Number(v) => Ok(Expr::Number(v)),
            Tok::Ident(name) => match name.as_str() {
                "u" => Ok(Expr::Variable(Var::U)),
                "t" => Ok(Expr::Variable(Var::T)),
                _ => {
                    if let Some(f) = Func::from_name(&name) {
                        self.call(f, offset)
                    } else {
                        Err(ParseError {
                            message: format!("unknown identifier `{name}`"),
                            offset,
                        })
                    }
                }
            },
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen(offset)?;
                Ok(e)
            }
            Tok::End => Err(ParseError {
                message: "unexpected end of input".into(),
                offset,
            }),
            other => Err(ParseError {
                message: format!("unexpected token `{other:?}`"),
                offset,
            }),
        }
    }

    fn call(&mut self, f: Func, name_offset: usize) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        if tok != Tok::LParen {
            return Err(ParseError {
                message: format!("expected `(` after `{}`", f.name()),
                offset,
            });
        }
        let mut args = vec![self.expr()?];
        while self.peek().0 == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect_rparen(offset)?;
        if args.len() != f.arity() {
            return Err(ParseError {
                message: format!(
                    "`{}` takes {} argument(s), got {}",
                    f.name(),
                    f.arity(),
                    args.len()
                ),
                offset: name_offset,
            });
        }
        Ok(Expr::Call(f, args))
    }

    fn expect_rparen(&mut self, open_offset: usize) -> Result<(), ParseError> {
        let (tok, offset) = self.bump();
        if tok == Tok::RParen {
            Ok(())
        } else {
            Err(ParseError {
                message: format!("unbalanced parenthesis opened at offset {open_offset}"),
                offset,
            })
        }
    }
}
