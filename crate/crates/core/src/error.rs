use thiserror::Error;

/// Errors produced by the exact, certified and search layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed continued fraction literal: {0}")]
    Parse(String),

    #[error("partial quotient at position {position} must be >= 1, got {value}")]
    NonPositiveDigit { position: usize, value: String },

    #[error("periodic block is empty")]
    EmptyPeriod,

    #[error("expansion has no partial quotient at index {0}")]
    Exhausted(usize),

    #[error("precision exhausted at index {index}: {detail}")]
    PrecisionExhausted { index: usize, detail: String },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("arithmetic across different radicands (sqrt {0} vs sqrt {1})")]
    MixedRadicand(String, String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("expansion is not eventually periodic")]
    NotPeriodic,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("depth {depth} exceeds the supported limit {limit}")]
    DepthTooLarge { depth: usize, limit: usize },

    #[error("gap ordering violated: {0}")]
    Ordering(String),

    #[error("malformed Legendre sequence: {0}")]
    MalformedSequence(String),

    #[error("corner maximum {corner} disagrees with certified box bound {grid}")]
    CornerMaximality { corner: String, grid: String },

    #[error("target {m} lies outside (1/4, {omega0}]")]
    OutOfRange { m: String, omega0: String },

    #[error("anomaly: {0}")]
    Anomaly(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
