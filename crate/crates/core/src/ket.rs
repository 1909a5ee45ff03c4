//! Bra-ket state expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/')? factor)*      juxtaposition multiplies
//! factor := number | constant | func '(' expr ')' | ket | '(' expr ')' | '-' factor
//! ket    := '|' [01]+ '>'
//! constant := i | pi | w                        w = e^{2iπ/3}
//! func   := sqrt | exp | conj
//! ```
//!
//! Whitespace is insignificant and `#` starts a comment running to the end
//! of the line. Juxtaposition binds like `*` and is allowed before a ket, a
//! parenthesis or a name, so `w|0101>`, `2sqrt(2)` and `0.5i` all parse.
//! Every ket in one expression must have the same width.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, ParseError, ParseErrorKind, Span};
use crate::numfmt::fmt_sig;
use crate::qstate::{make_state, omega, NormalizePolicy, PureState};

/// Widest ket accepted; evaluation allocates `2^width` amplitudes.
pub const MAX_KET_WIDTH: usize = 24;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    I,
    Pi,
    /// Primitive cube root of unity.
    W,
}

impl Constant {
    pub fn value(self) -> Complex64 {
        match self {
            Constant::I => Complex64::new(0.0, 1.0),
            Constant::Pi => Complex64::new(PI, 0.0),
            Constant::W => omega(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Constant::I => "i",
            Constant::Pi => "pi",
            Constant::W => "w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Conj,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Conj => "conj",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    /// Basis ket; the bitstring is stored as written.
    Ket(String),
    Number(f64),
    Constant(Constant),
    Neg(Box<KetAst>),
    Binary {
        op: BinOp,
        lhs: Box<KetAst>,
        rhs: Box<KetAst>,
    },
    Call {
        func: Func,
        arg: Box<KetAst>,
    },
}

/// Syntax tree of a ket expression, each node carrying its source span.
#[derive(Debug, Clone, PartialEq)]
pub struct KetAst {
    pub kind: NodeKind,
    pub span: Span,
}

impl KetAst {
    /// Width of the kets in this tree, if any.
    pub fn ket_width(&self) -> Option<usize> {
        match &self.kind {
            NodeKind::Ket(bits) => Some(bits.len()),
            NodeKind::Number(_) | NodeKind::Constant(_) => None,
            NodeKind::Neg(a) | NodeKind::Call { arg: a, .. } => a.ket_width(),
            NodeKind::Binary { lhs, rhs, .. } => lhs.ket_width().or_else(|| rhs.ket_width()),
        }
    }

    fn check_widths(&self, expected: &mut Option<usize>) -> Result<(), ParseError> {
        match &self.kind {
            NodeKind::Ket(bits) => match *expected {
                None => {
                    *expected = Some(bits.len());
                    Ok(())
                }
                Some(w) if w == bits.len() => Ok(()),
                Some(w) => Err(ParseError::new(
                    ParseErrorKind::Width {
                        expected: w,
                        found: bits.len(),
                    },
                    self.span,
                )),
            },
            NodeKind::Number(_) | NodeKind::Constant(_) => Ok(()),
            NodeKind::Neg(a) | NodeKind::Call { arg: a, .. } => a.check_widths(expected),
            NodeKind::Binary { lhs, rhs, .. } => {
                lhs.check_widths(expected)?;
                rhs.check_widths(expected)
            }
        }
    }
}

/// Prefix (s-expression) rendering, e.g. `(/ (+ |01> |10>) (sqrt 2))`.
impl fmt::Display for KetAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NodeKind::Ket(bits) => write!(f, "|{bits}>"),
            NodeKind::Number(x) => write!(f, "{}", fmt_sig(*x, 17)),
            NodeKind::Constant(c) => f.write_str(c.name()),
            NodeKind::Neg(a) => write!(f, "(- {a})"),
            NodeKind::Binary { op, lhs, rhs } => write!(f, "({} {lhs} {rhs})", op.symbol()),
            NodeKind::Call { func, arg } => write!(f, "({} {arg})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Ket(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |t: Tok| (t, Span::new(start, start + 1));
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'+' => {
                toks.push(single(Tok::Plus));
                i += 1;
            }
            b'-' => {
                toks.push(single(Tok::Minus));
                i += 1;
            }
            b'*' => {
                toks.push(single(Tok::Star));
                i += 1;
            }
            b'/' => {
                toks.push(single(Tok::Slash));
                i += 1;
            }
            b'(' => {
                toks.push(single(Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push(single(Tok::RParen));
                i += 1;
            }
            b'|' => {
                i += 1;
                while i < bytes.len() && (bytes[i] == b'0' || bytes[i] == b'1') {
                    i += 1;
                }
                let bits = &text[start + 1..i];
                if i >= bytes.len() || bytes[i] != b'>' {
                    let end = if i < bytes.len() { next_char_end(text, i) } else { i };
                    let msg = if bits.is_empty() {
                        "expected bitstring after '|'"
                    } else {
                        "expected '>' to close ket"
                    };
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax(msg.into()),
                        Span::new(start, end),
                    ));
                }
                i += 1;
                if bits.is_empty() {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax("empty ket".into()),
                        Span::new(start, i),
                    ));
                }
                if bits.len() > MAX_KET_WIDTH {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax(format!("ket wider than {MAX_KET_WIDTH} qubits")),
                        Span::new(start, i),
                    ));
                }
                toks.push((Tok::Ket(bits.to_string()), Span::new(start, i)));
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent only if digits follow, so `2exp(x)` still lexes.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let span = Span::new(start, i);
                let value: f64 = text[start..i].parse().map_err(|_| {
                    ParseError::new(ParseErrorKind::Syntax("malformed number".into()), span)
                })?;
                toks.push((Tok::Number(value), span));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), Span::new(start, i)));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError::new(
                    ParseErrorKind::IllegalChar(ch),
                    Span::new(start, start + ch.len_utf8()),
                ));
            }
        }
    }
    Ok(toks)
}

fn next_char_end(text: &str, i: usize) -> usize {
    text[i..].chars().next().map_or(i, |c| i + c.len_utf8())
}

struct Parser<'a> {
    toks: &'a [(Tok, Span)],
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_span(&self) -> Span {
        self.toks
            .get(self.pos)
            .map_or(Span::new(self.end, self.end), |(_, s)| *s)
    }

    fn bump(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(ParseErrorKind::Syntax(msg.into()), self.peek_span()))
    }

    fn binary(op: BinOp, lhs: KetAst, rhs: KetAst) -> KetAst {
        let span = lhs.span.join(rhs.span);
        KetAst {
            kind: NodeKind::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            span,
        }
    }

    fn expr(&mut self) -> Result<KetAst, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("expression nested too deeply");
        }
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Self::binary(op, lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<KetAst, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    BinOp::Mul
                }
                Some(Tok::Slash) => {
                    self.bump();
                    BinOp::Div
                }
                Some(Tok::Ket(_) | Tok::LParen | Tok::Ident(_)) => BinOp::Mul,
                _ => break,
            };
            let rhs = self.factor()?;
            lhs = Self::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<KetAst, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("expression nested too deeply");
        }
        let Some((tok, span)) = self.bump() else {
            self.pos -= 1;
            return self.error("unexpected end of expression");
        };
        let node = match tok {
            Tok::Number(x) => KetAst {
                kind: NodeKind::Number(x),
                span,
            },
            Tok::Ket(bits) => KetAst {
                kind: NodeKind::Ket(bits),
                span,
            },
            Tok::Minus => {
                let inner = self.factor()?;
                let span = span.join(inner.span);
                KetAst {
                    kind: NodeKind::Neg(Box::new(inner)),
                    span,
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.expect_rparen(span)?;
                // Parentheses only group; keep the inner node with a widened span.
                KetAst {
                    kind: inner.kind,
                    span: span.join(close),
                }
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sqrt" => Some(Func::Sqrt),
                    "exp" => Some(Func::Exp),
                    "conj" => Some(Func::Conj),
                    _ => None,
                };
                let constant = match name.as_str() {
                    "i" => Some(Constant::I),
                    "pi" => Some(Constant::Pi),
                    "w" => Some(Constant::W),
                    _ => None,
                };
                if let Some(func) = func {
                    match self.bump() {
                        Some((Tok::LParen, open)) => {
                            let arg = self.expr()?;
                            let close = self.expect_rparen(open)?;
                            KetAst {
                                kind: NodeKind::Call {
                                    func,
                                    arg: Box::new(arg),
                                },
                                span: span.join(close),
                            }
                        }
                        _ => {
                            self.pos -= 1;
                            return self.error(format!("expected '(' after {name}"));
                        }
                    }
                } else if let Some(c) = constant {
                    KetAst {
                        kind: NodeKind::Constant(c),
                        span,
                    }
                } else {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax(format!("unknown name {name:?}")),
                        span,
                    ));
                }
            }
            Tok::Plus | Tok::Star | Tok::Slash | Tok::RParen => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax("expected a number, constant, ket or '('".into()),
                    span,
                ));
            }
        };
        self.depth -= 1;
        Ok(node)
    }

    fn expect_rparen(&mut self, open: Span) -> Result<Span, ParseError> {
        match self.bump() {
            Some((Tok::RParen, s)) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(ParseError::new(
                    ParseErrorKind::Syntax("unclosed '('".into()),
                    open.join(self.peek_span()),
                ))
            }
        }
    }
}

/// Parse an expression into a syntax tree, enforcing uniform ket width.
pub fn parse_ket(text: &str) -> Result<KetAst, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::EmptyInput,
            Span::new(0, text.len()),
        ));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let ast = p.expr()?;
    if p.pos < toks.len() {
        return p.error("unexpected token after expression");
    }
    ast.check_widths(&mut None)?;
    Ok(ast)
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(Complex64),
    Vector(Vec<Complex64>),
}

fn type_error<T>(msg: &str, span: Span) -> Result<T, ParseError> {
    Err(ParseError::new(ParseErrorKind::Type(msg.into()), span))
}

fn eval(ast: &KetAst) -> Result<Value, ParseError> {
    use Value::{Scalar, Vector};
    Ok(match &ast.kind {
        NodeKind::Number(x) => Scalar(Complex64::new(*x, 0.0)),
        NodeKind::Constant(c) => Scalar(c.value()),
        NodeKind::Ket(bits) => {
            let index = usize::from_str_radix(bits, 2).expect("lexer admits only 0/1");
            let mut v = vec![Complex64::new(0.0, 0.0); 1 << bits.len()];
            v[index] = Complex64::new(1.0, 0.0);
            Vector(v)
        }
        NodeKind::Neg(a) => match eval(a)? {
            Scalar(s) => Scalar(-s),
            Vector(v) => Vector(v.into_iter().map(|x| -x).collect()),
        },
        NodeKind::Call { func, arg } => match (func, eval(arg)?) {
            (Func::Sqrt, Scalar(s)) => Scalar(s.sqrt()),
            (Func::Exp, Scalar(s)) => Scalar(s.exp()),
            (Func::Conj, Scalar(s)) => Scalar(s.conj()),
            (Func::Conj, Vector(v)) => Vector(v.into_iter().map(|x| x.conj()).collect()),
            (f, Vector(_)) => return type_error(&format!("{} of a ket", f.name()), ast.span),
        },
        NodeKind::Binary { op, lhs, rhs } => {
            let (l, r) = (eval(lhs)?, eval(rhs)?);
            match (op, l, r) {
                (BinOp::Add, Scalar(a), Scalar(b)) => Scalar(a + b),
                (BinOp::Sub, Scalar(a), Scalar(b)) => Scalar(a - b),
                (BinOp::Mul, Scalar(a), Scalar(b)) => Scalar(a * b),
                (BinOp::Div, Scalar(_), Scalar(b)) | (BinOp::Div, Vector(_), Scalar(b))
                    if b == Complex64::new(0.0, 0.0) =>
                {
                    return Err(ParseError::new(ParseErrorKind::DivisionByZero, rhs.span));
                }
                (BinOp::Div, Scalar(a), Scalar(b)) => Scalar(a / b),
                (BinOp::Add, Vector(a), Vector(b)) => {
                    Vector(a.into_iter().zip(b).map(|(x, y)| x + y).collect())
                }
                (BinOp::Sub, Vector(a), Vector(b)) => {
                    Vector(a.into_iter().zip(b).map(|(x, y)| x - y).collect())
                }
                (BinOp::Mul, Scalar(s), Vector(v)) | (BinOp::Mul, Vector(v), Scalar(s)) => {
                    Vector(v.into_iter().map(|x| x * s).collect())
                }
                (BinOp::Div, Vector(v), Scalar(s)) => Vector(v.into_iter().map(|x| x / s).collect()),
                (BinOp::Add | BinOp::Sub, _, _) => {
                    return type_error("cannot add a scalar and a ket", ast.span)
                }
                (BinOp::Mul, Vector(_), Vector(_)) => {
                    return type_error("cannot multiply two kets", ast.span)
                }
                (BinOp::Div, _, Vector(_)) => return type_error("cannot divide by a ket", ast.span),
            }
        }
    })
}

/// Evaluate a parsed expression into a state.
pub fn eval_ket(ast: &KetAst, policy: NormalizePolicy) -> Result<PureState, Error> {
    match eval(ast)? {
        Value::Vector(v) => {
            let n = v.len().trailing_zeros() as usize;
            make_state(n, v, policy)
        }
        Value::Scalar(_) => Err(Error::Parse(ParseError::new(
            ParseErrorKind::Type("expression is a scalar, not a state".into()),
            ast.span,
        ))),
    }
}

/// `parse_ket` followed by `eval_ket`.
pub fn parse_state(text: &str, policy: NormalizePolicy) -> Result<PureState, Error> {
    eval_ket(&parse_ket(text)?, policy)
}

/// Canonical expression for a state: nonzero terms in increasing index
/// order, each `(re±imi)*|bits>`, numbers rounded to `precision` significant
/// digits. At 17 digits the output evaluates back to the same amplitudes.
pub fn format_ket(state: &PureState, precision: usize) -> String {
    let n = state.n_qubits();
    let terms: Vec<String> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
        .map(|(i, a)| {
            let sign = if a.im < 0.0 { '-' } else { '+' };
            format!(
                "({}{}{}i)*|{:0width$b}>",
                fmt_sig(a.re, precision),
                sign,
                fmt_sig(a.im.abs(), precision),
                i,
                width = n
            )
        })
        .collect();
    terms.join(" + ")
}
