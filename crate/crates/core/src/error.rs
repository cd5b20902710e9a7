use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// No observation received positive kernel weight.
    #[error("no observation receives positive weight in the estimation window")]
    EmptyWindow,

    /// Every point of the search grid was skipped.
    #[error("no grid point admits both one-sided estimates; bandwidth is too small for the data density")]
    NoValidGridPoint,

    /// Every bandwidth candidate failed on the original sample.
    #[error("every bandwidth candidate failed to produce a jump estimate")]
    AllCandidatesFailed,

    /// The local linear fit has fewer than two distinct predictor values in its window.
    #[error("local linear fit is singular at x = {x}")]
    SingularFit { x: f64 },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at row {row}, column `{column}`: {reason}")]
    Parse {
        row: usize,
        column: String,
        reason: String,
    },

    #[error("predictor value {value} at row {row} is not positive; cannot take the logarithm")]
    NonPositivePredictor { row: usize, value: f64 },

    #[error("no rows remain after filtering")]
    EmptyAfterFilter,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
