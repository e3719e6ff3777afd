//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while loading data or computing a verdict.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A token in an input file failed to parse as a number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An input file is structurally malformed (ragged rows, wrong field
    /// count, inconsistent ranges).
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    /// A pair file referenced by the metadata is absent.
    #[error("missing pair file for `{0}`")]
    MissingFile(String),

    /// Data carries no usable signal (constant column, zero variance).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// Fewer observations than the operation needs.
    #[error("need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    /// Paired inputs of different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A value is NaN or infinite where a finite number is required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Invalid configuration (empty method set, leader not voting, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A statistic whose denominator is empty for the given records.
    #[error("undefined: {0}")]
    Undefined(String),
}
