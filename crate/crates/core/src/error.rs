use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("argument outside the domain of {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("order {0} is within the integer guard band; perturb the order")]
    NearIntegerOrder(f64),
    #[error("{what} did not converge within {budget} steps")]
    NonConvergence { what: &'static str, budget: usize },
    #[error("initial condition grows too fast: |y g(y)| = {magnitude:e} at y = {y}")]
    InvalidGrowth { y: f64, magnitude: f64 },
    #[error("s = {re}+{im}i is outside the strip ({lo}, {hi})")]
    OutOfStrip { re: f64, im: f64, lo: f64, hi: f64 },
    #[error("contour result has imaginary part {imag:e} (tolerance {tol:e})")]
    SymmetryViolation { imag: f64, tol: f64 },
    #[error("contour integrand magnitude {magnitude:e} at the truncation height exceeds {tol:e}")]
    Truncation { magnitude: f64, tol: f64 },
    #[error("finite-difference solution left the admissible range at step {step}")]
    Instability { step: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    /// True for failures of an otherwise valid computation (budget, truncation, symmetry).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SymmetryViolation { .. }
                | Error::Truncation { .. }
                | Error::Instability { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
