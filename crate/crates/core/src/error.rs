use thiserror::Error;

/// Errors produced by the sampling, spectral and limit-law routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// The density diverges at this support endpoint; integrate around it instead.
    #[error("density is singular at support endpoint x = {0}")]
    SingularEndpoint(f64),

    #[error("quadrature did not reach tolerance {tol:e} (error estimate {estimate:e})")]
    Accuracy { tol: f64, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
