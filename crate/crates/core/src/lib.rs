//! Radially symmetric solutions of the diffusion equation
//! `kappa (u_rr + u_r / r) = u_t` on `r > 0`.
//!
//! The solution is evaluated four independent ways so that each can police
//! the others:
//!
//! * [`quadrature`]: adaptive Gauss-Kronrod integration of the heat-kernel
//!   (Hankel convolution) form, treated as ground truth;
//! * [`series`]: residue series in Laguerre polynomials and Kummer functions;
//! * [`mellin`]: numerical Mellin-Barnes contour integrals;
//! * [`fd`]: a Crank-Nicolson finite-difference referee.
//!
//! [`log_kernel`] handles initial data of the form `h(r) ln r`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod fd;
pub mod log_kernel;
pub mod mellin;
pub mod problem;
pub mod quadrature;
pub mod selftest;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
pub use problem::{InitialCondition, PhysicalSetup, SupportHint};
