use thiserror::Error;

/// Errors raised by detectors, generators, the fixed-point model and the
/// simulation harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input shape mismatch: {0}")]
    InputShape(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate channel gain for user {user}: mu = 0")]
    DegenerateGain { user: usize },

    #[error("column {column} of the channel matrix has zero norm")]
    DegenerateColumn { column: usize },

    #[error("linear solver failed: {0}")]
    SolverFailure(String),

    #[error("fixed-point range exceeded: {0}")]
    Range(String),

    #[error("reciprocal of zero")]
    DivisionByZero,

    #[error("malformed lookup table: {0}")]
    LutFormat(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("{detector} at {ebn0_db} dB, trial {trial}: {source}")]
    Trial {
        detector: String,
        ebn0_db: f64,
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
