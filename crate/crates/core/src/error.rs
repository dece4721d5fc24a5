//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A denominator factor of the susceptibility vanished exactly.
    #[error("susceptibility singularity: {factor} is exactly zero")]
    Singularity { factor: &'static str },

    /// Quadrature failed its order-doubling convergence check.
    #[error("quadrature did not converge: estimate {estimate:e}, change on order doubling {delta:e}")]
    QuadratureNonConvergence { estimate: f64, delta: f64 },

    /// A spectral scan range missed too much of the total weight.
    #[error("l range covers only {covered:.6} of spectral mass (need >= {required}); widen the interval by ~{suggested_margin} on each side")]
    RangeTooNarrow {
        covered: f64,
        required: f64,
        suggested_margin: i32,
    },

    /// Post-selection kept no weight.
    #[error("post-selection onto {0} left an empty subspace (zero total weight)")]
    EmptySubspace(String),

    /// Two objects were built over incompatible basis labels.
    #[error("basis label mismatch: {0}")]
    LabelMismatch(String),

    /// A matrix handed to a Hermitian routine was not Hermitian.
    #[error("matrix is not Hermitian within {tol:e} (max deviation {deviation:e})")]
    NotHermitian { deviation: f64, tol: f64 },

    /// A ratio of counts with an all-zero denominator.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// The linear-inversion design matrix was singular.
    #[error("singular design matrix: {0}")]
    SingularDesign(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
