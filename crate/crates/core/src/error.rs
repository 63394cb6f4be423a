use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("particles {0} and {1} coincide")]
    Collision(usize, usize),

    #[error("eigensolver did not converge after {iterations} iterations (n = {n})")]
    NoConvergence { n: usize, iterations: usize },

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("negative density {0:e} (beyond round-off)")]
    NegativeDensity(f64),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("edge normalization undefined for n = {n}: kappa_n = {kappa} <= 0")]
    NonPositiveKappa { n: u64, kappa: f64 },

    #[error("special function evaluation did not converge: {0}")]
    SpecialFunction(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
