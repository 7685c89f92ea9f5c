//! Source locations for diagnostics.

use std::fmt;
use std::sync::Arc;

/// A half-open region of a source file, in 1-based lines and columns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file: Arc<str>, line: u32, col: u32, end_line: u32, end_col: u32) -> Span {
        debug_assert!((line, col) <= (end_line, end_col));
        Span { file, line, col, end_line, end_col }
    }

    /// A placeholder span for synthesized nodes (prelude internals, tests).
    pub fn synthetic() -> Span {
        Span { file: Arc::from("<internal>"), line: 0, col: 0, end_line: 0, end_col: 0 }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(&self, other: &Span) -> Span {
        let (line, col) = (self.line, self.col).min((other.line, other.col));
        let (end_line, end_col) = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        Span { file: self.file.clone(), line, col, end_line, end_col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}
