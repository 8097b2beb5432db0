//! Crate-wide error type.
//!
//! Numerical failure modes are explicit values, never silent: quadrature
//! that cannot meet its target returns [`Error::NonConvergence`] carrying
//! the best estimate, and the coefficient recursion reports inconsistent
//! resonant steps instead of patching over them.

use num_complex::Complex64;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor or evaluator was called with parameters outside the
    /// documented domain.  The message names the violated constraint.
    #[error("parameter out of domain: {0}")]
    ParameterOutOfDomain(String),

    /// Weights live on (0, infinity); evaluation elsewhere is undefined.
    #[error("weight evaluation requires t > 0 (got t = {0})")]
    NonPositiveT(f64),

    /// An operation needed lower-triangular `U` and `V`.
    #[error("matrix is not lower triangular: {0}")]
    NotLowerTriangular(String),

    /// Inversion of a singular (or numerically singular) matrix.
    #[error("singular matrix in {0}")]
    SingularMatrix(String),

    /// The quadrature could not reach the requested accuracy within its
    /// evaluation budget.  `value` is the best available estimate.
    #[error(
        "quadrature did not converge: error estimate {error_estimate:.3e} \
         after {evaluations} evaluations (target {target:.3e})"
    )]
    NonConvergence {
        value: Box<[[Complex64; 2]; 2]>,
        error_estimate: f64,
        target: f64,
        evaluations: usize,
    },

    /// A resonant step of the coefficient recursion had no solution.
    #[error("coefficient recursion inconsistent at (n, k) = ({n}, {k}): {detail}")]
    RecursionInconsistent { n: usize, k: usize, detail: String },

    /// A Gram matrix came out non-Hermitian or not positive definite,
    /// signalling out-of-domain parameters or moment breakdown.
    #[error("Gram matrix S_{n} is not positive definite: {detail}")]
    GramNotPositiveDefinite { n: usize, detail: String },

    /// Malformed or mismatched input documents.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
