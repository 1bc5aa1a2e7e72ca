use thiserror::Error;

/// Failures raised by the library. The CLI maps [`Error::is_numerical`]
/// variants to exit code 3 and the rest to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sum mismatch: {left} vs {right}")]
    SumMismatch { left: f64, right: f64 },

    #[error("finite-difference step leaves the domain: {0}")]
    StepOutOfDomain(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (value {value}, error estimate {err_est})")]
    NonConvergence {
        subdivisions: usize,
        value: f64,
        err_est: f64,
    },

    #[error("integrand returned a non-finite value at x = {0}")]
    NonFiniteIntegrand(f64),

    #[error("characteristic function is not absolutely integrable: {0}")]
    Integrability(String),

    #[error("overflow: {0}")]
    Overflow(String),

    /// The quantity is infinite; `value` carries the signed limit.
    #[error("divergent: {reason} (value {value})")]
    Divergent { reason: String, value: f64 },
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NonFiniteIntegrand(_)
                | Error::Integrability(_)
                | Error::Overflow(_)
                | Error::Divergent { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
