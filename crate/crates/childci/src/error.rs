use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("age out of range: {0} months (expected 12..=96)")]
    AgeOutOfRange(i64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema version mismatch: got {got:?}, expected {expected:?}")]
    SchemaVersion { got: String, expected: String },

    #[error("duplicate child id {0:?}")]
    DuplicateChild(String),

    #[error("duplicate session for child {child} test {test}")]
    DuplicateSession { child: String, test: String },

    #[error("missing subjects index at {0}")]
    MissingSubjectsIndex(String),

    #[error("unsupported session format: {0}")]
    UnsupportedFormat(String),

    #[error("series too short: got {got}, need at least {need}")]
    SeriesTooShort { got: usize, need: usize },

    #[error("stroke too short: got {got} samples, need at least {need}")]
    StrokeTooShort { got: usize, need: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: got {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("group {group} too small: {size} children, need at least {need}")]
    GroupTooSmall {
        group: &'static str,
        size: usize,
        need: usize,
    },

    #[error("combination size {x} exceeds element count {n}")]
    CombinationSize { n: usize, x: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
