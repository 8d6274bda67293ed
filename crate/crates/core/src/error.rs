use thiserror::Error;

/// Failure modes shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("{what} did not converge (estimate {estimate:e}, residual {residual:e})")]
    NotConverged {
        what: &'static str,
        estimate: f64,
        residual: f64,
    },
    #[error("integrand returned a non-finite value at t = {at}")]
    NonFinite { at: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pole(msg: impl Into<String>) -> Self {
        Error::Pole(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
