use thiserror::Error;

/// Errors raised while building meshes, spaces, operators or solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was asked for an object outside its domain of definition,
    /// e.g. a vertex patch around a boundary vertex.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// The operator handed to a solver or factorization is not SPD.
    #[error("operator is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
