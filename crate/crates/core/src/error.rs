use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operator combination does not factor through the square roots of the
    /// arm states, so no contraction exists.
    #[error("certificate invalid: support leakage {leakage:e} exceeds tolerance {tolerance:e}")]
    SupportViolation { leakage: f64, tolerance: f64 },

    #[error("certificate constraint violated: contraction slack {slack:e} exceeds tolerance {tolerance:e}")]
    ConstraintViolated { slack: f64, tolerance: f64 },

    #[error("missing record ({mu}, {nu})")]
    MissingRecord { mu: String, nu: String },

    #[error("no Jones convention reproduces the noise program: {0}")]
    Convention(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
