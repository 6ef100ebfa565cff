use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureFailure(String),

    #[error("fixed-point iteration did not converge: {0}")]
    Nonconvergence(String),

    #[error("singular resolvent: |1 + S(p)| < {0:e} at a contour node")]
    SingularResolvent(f64),

    #[error("transform evaluation returned a non-finite value at {0}")]
    NonFinite(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
