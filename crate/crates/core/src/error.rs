use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The gradient does not exist at the given point (zero determinant, zero base
    /// under a negative power, ...).
    #[error("singular gradient: {0}")]
    SingularGradient(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// A dual argument lies off the image manifold on which the transform lives.
    #[error("off manifold: defect {defect:e} exceeds tolerance {tolerance:e}")]
    OffManifold { defect: f64, tolerance: f64 },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
        best: Box<crate::linalg::Matrix>,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// True for the errors that mean "this point is outside where the function is
    /// defined", as opposed to malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::SingularGradient(_)
                | Error::NotInvertible(_)
                | Error::OffManifold { .. }
        )
    }
}
