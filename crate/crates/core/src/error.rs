use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Location-annotated syntax error, shared by the ket-expression parser, the
/// gate-list parser and the JSON reader.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub position: usize,
    /// 1-based line.
    pub line: usize,
    /// 1-based column.
    pub column: usize,
    pub message: String,
    /// Tokens that would have been accepted at `position`; may be empty.
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn at(source: &str, position: usize, message: impl Into<String>) -> Self {
        let position = position.min(source.len());
        let before = &source[..position];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            position,
            line,
            column,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    pub fn expecting<I, S>(mut self, expected: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.expected = expected.into_iter().map(Into::into).collect();
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state vector has no amplitude above the zero threshold")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad subsystem: {0}")]
    BadSubsystem(String),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("state is not maximally entangled (|lambda0 - lambda1| = {0:.3e})")]
    NotMaximal(f64),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("complex concurrences are not realizable: {0}")]
    Unrealizable(String),
    #[error("no gauge candidates supplied")]
    EmptyCandidates,
    #[error("parse error: {0}")]
    Parse(ParseError),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by malformed input text rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::UnknownName(_) | Error::Schema { .. })
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}
