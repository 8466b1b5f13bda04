use thiserror::Error;

/// CLI failure, carrying the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }

    pub fn io(context: impl std::fmt::Display, err: std::io::Error) -> Self {
        CliError::Data(format!("{context}: {err}"))
    }
}

impl From<vbpbb::Error> for CliError {
    fn from(err: vbpbb::Error) -> Self {
        use vbpbb::Error as E;
        let msg = err.to_string();
        match err {
            E::InvalidPeriod(_) | E::InvalidParameter(_) => CliError::Usage(msg),
            E::ScenarioInfeasible { .. } => CliError::Infeasible(msg),
            E::InvalidSeries(_)
            | E::Parse { .. }
            | E::NonContiguousTime { .. }
            | E::SeriesTooShort { .. }
            | E::InsufficientData(_)
            | E::InvalidComparison(_)
            | E::UndefinedCorrelation(_)
            | E::InvalidAggregation(_) => CliError::Data(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
