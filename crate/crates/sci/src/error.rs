use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum SciError {
    /// A precondition on the input values was violated (bad order, ties where
    /// forbidden, non-finite values, invalid coefficients, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The series is too short for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A quantity left its mathematical domain (e.g. log of a non-positive
    /// SCI estimate).
    #[error("domain error: {0}")]
    Domain(String),

    /// File ingestion failed; carries a line number when one is known.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SciError>;
