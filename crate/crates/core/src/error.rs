use thiserror::Error;

/// Errors raised by the numerical pipelines.
///
/// The CLI maps `InvalidInput`, `Assumption`, `Config` and `Dimension` (an
/// oversized request) to exit code 2 and
/// every other variant to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("standing assumption violated: {condition}")]
    Assumption { condition: String },

    #[error("quadrature in {context} did not converge (error estimate {achieved:.3e}, target {target:.3e})")]
    Quadrature {
        context: &'static str,
        achieved: f64,
        target: f64,
    },

    #[error("eigensolver failed in {context}: {detail}")]
    Eigen { context: &'static str, detail: String },

    #[error("matrix is not numerically positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e} (tolerance {tolerance:.3e})")]
    NotPsd {
        min_eigenvalue: f64,
        tolerance: f64,
    },

    #[error("linear solve failed in {context}: residual {residual:.3e}")]
    Solve { context: &'static str, residual: f64 },

    #[error("dimension {dim} exceeds the limit {limit} for {context}")]
    Dimension {
        context: &'static str,
        dim: usize,
        limit: usize,
    },

    #[error("floating-point overflow evaluating {0}")]
    Overflow(String),

    #[error("invariant check failed: {0}")]
    CheckFailed(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// `true` for errors caused by bad input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Assumption { .. } | Error::Config(_) | Error::Dimension { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
