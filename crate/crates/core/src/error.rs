use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular argument: {0}")]
    SingularArgument(String),
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    #[error("divergent energy: {0}")]
    Divergent(String),
    #[error("quadrature did not converge after {panels} panels (estimate {estimate:e}, error {error:e})")]
    NonConvergence { panels: usize, estimate: f64, error: f64 },
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
