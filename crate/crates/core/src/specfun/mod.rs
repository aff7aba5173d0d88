//! Scalar special functions in double precision.
//!
//! Everything here is a pure function of its arguments. Complex values use
//! [`num_complex::Complex64`]; the contour code evaluates them on vertical
//! lines with `|Im s| <= 500`.

mod bessel;
mod gamma;
mod hypergeometric;
mod laguerre;
mod sum;

pub use bessel::{
    bessel_i0_scaled, bessel_ik_product, bessel_iv, bessel_j0, bessel_k0, bessel_k0_scaled,
    bessel_kv,
};
pub use gamma::{
    digamma_int, gamma_complex, gamma_real, ln_gamma_real, log_gamma_complex, sin_pi, EULER_GAMMA,
};
pub use hypergeometric::{hyp1f1, hyp1f1_real, whittaker_m};
pub use laguerre::{laguerre, laguerre_asymp};
pub use sum::{CompensatedSum, ComplexCompensatedSum};

use crate::error::{Error, Result};

pub type ComplexValue = num_complex::Complex64;

/// Summation controls for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol {rel_tol} must lie in (0, 1e-3)"
            )));
        }
        if max_terms < 16 {
            return Err(Error::InvalidParameter(format!(
                "max_terms {max_terms} must be at least 16"
            )));
        }
        Ok(Accuracy { rel_tol, max_terms })
    }

    /// Full double precision with a generous term budget.
    pub fn tight() -> Self {
        Accuracy {
            rel_tol: 1e-16,
            max_terms: 20_000,
        }
    }
}
