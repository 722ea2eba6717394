//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors surfaced by parsing, window bookkeeping, and the exact solvers.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Input text could not be parsed (words, rationals, series, files).
    #[error("parse error: {0}")]
    Parse(String),

    /// A word was built from or fed to an operation over the wrong alphabet.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// A word violates a structural precondition (for example a leading b0
    /// where a convergent word is required, or a zero index where a positive
    /// one is required).
    #[error("invalid word: {0}")]
    InvalidWord(String),

    /// A coefficient or value was requested outside the guaranteed-exact
    /// truncation window of a series or bimould.
    #[error("truncation window exceeded: {0}")]
    WindowExceeded(String),

    /// An operation was asked for at a depth the implementation does not
    /// carry (the Eisenstein pipeline is built through depth 2).
    #[error("unsupported depth: {0}")]
    DepthUnsupported(String),

    /// Exact polynomial division left a nonzero remainder. This indicates an
    /// internal inconsistency: the divided differences used by the symmetry
    /// checkers are always divisible when the inputs are well-formed.
    #[error("exact division failed: {0}")]
    DivisionRemainder(String),

    /// The linear system assembled by a solver was inconsistent.
    #[error("solver inconsistency: {0}")]
    SolverInconsistent(String),

    /// Underlying I/O failure while reading or writing a file format.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a mould or beta table file.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
