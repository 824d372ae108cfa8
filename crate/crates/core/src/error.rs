use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpiError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("log-density is not twice differentiable at x = {x}")]
    NonSmooth { x: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("singular transport map at x = {x}: target density vanishes")]
    SingularMap { x: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("degenerate case: {0}")]
    Degenerate(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T, E = EpiError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> EpiError {
    EpiError::Domain(msg.into())
}
