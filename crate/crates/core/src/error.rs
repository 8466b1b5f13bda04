use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid period {0}: period must be at least 1")]
    InvalidPeriod(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-contiguous time on line {line}: expected t={expected}, found t={found}")]
    NonContiguousTime {
        line: usize,
        expected: i64,
        found: i64,
    },

    #[error(
        "series too short: length {len} but the filter needs at least {required} observations"
    )]
    SeriesTooShort { len: usize, required: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("correlation undefined: {0} has zero variance")]
    UndefinedCorrelation(&'static str),

    #[error("invalid aggregation: {0}")]
    InvalidAggregation(String),

    #[error("scenario infeasible ({scenario}): {reason}")]
    ScenarioInfeasible { scenario: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
