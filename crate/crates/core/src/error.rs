//! Error types shared across the crate.

use std::fmt;

use thiserror::Error;

/// Byte range into a source expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    /// Smallest span covering both.
    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// What went wrong while lexing, parsing or evaluating a ket expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Character that cannot start any token.
    IllegalChar(char),
    /// Token stream does not match the grammar.
    Syntax(String),
    /// Kets of different widths in one expression.
    Width { expected: usize, found: usize },
    /// Scalar/vector mismatch, e.g. `1 + |0>` or `|0> * |1>`.
    Type(String),
    DivisionByZero,
    EmptyInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::IllegalChar(c) => write!(f, "illegal character {c:?}"),
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::Width { expected, found } => {
                write!(f, "ket width {found} does not match earlier width {expected}")
            }
            ParseErrorKind::Type(msg) => write!(f, "type error: {msg}"),
            ParseErrorKind::DivisionByZero => write!(f, "division by zero"),
            ParseErrorKind::EmptyInput => write!(f, "empty expression"),
        }
    }
}

/// A ket-expression error with the offending source span.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {span}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, span: Span) -> Self {
        ParseError { kind, span }
    }

    /// Render the error with a caret line under the offending source text.
    pub fn render(&self, source: &str) -> String {
        let line_start = source[..self.span.start.min(source.len())]
            .rfind('\n')
            .map_or(0, |p| p + 1);
        let line_end = source[line_start..]
            .find('\n')
            .map_or(source.len(), |p| line_start + p);
        let line = &source[line_start..line_end];
        let col = source[line_start..self.span.start.min(source.len())].chars().count();
        let width = source
            .get(self.span.start..self.span.end.min(line_end).max(self.span.start))
            .map_or(1, |s| s.chars().count().max(1));
        format!(
            "error: {self}\n  {line}\n  {}{}",
            " ".repeat(col),
            "^".repeat(width)
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector has length {found}, expected 2^{n_qubits} = {expected}")]
    Dimension {
        n_qubits: usize,
        expected: usize,
        found: usize,
    },

    #[error("qubit count must be at least {min}, got {found}")]
    Arity { min: usize, found: usize },

    #[error("operation requires exactly {expected} qubits, got {found}")]
    WrongQubitCount { expected: usize, found: usize },

    #[error("all-zero amplitude vector cannot be normalized")]
    DegenerateState,

    #[error("state norm {norm} differs from 1 by more than {tol:e}")]
    Normalization { norm: f64, tol: f64 },

    #[error("optimizer point is zero or not finite")]
    DegeneratePoint,

    #[error("unknown catalog state {0:?}")]
    CatalogMiss(String),

    #[error("invalid qubit subset: {0}")]
    Subset(String),

    #[error("qubit index {qubit} out of range 1..={n_qubits}")]
    QubitIndex { qubit: usize, n_qubits: usize },

    #[error("matrix is not unitary (max |U^dag U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("invalid minimizer config: {0}")]
    Config(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid state file: {0}")]
    StateFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
