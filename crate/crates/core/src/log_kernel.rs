//! Initial data `h(r) ln r` through the expansion
//!
//! ```text
//! I0(z) ln(z/2) = -K0(z) + sum_{n>=0} psi(n+1) (z/2)^{2n} / (n!)^2
//! ```
//!
//! With `z = y r / 2 kappa t` and `ln y = ln(z/2) + ln(4 kappa t / r)` the
//! solution splits into a log-scaled heat-kernel integral, a K0 integral and
//! a series of Gaussian moments `Z_s(h) = int h(y) y^s e^{-y^2 / 4 kappa t} dy`.

use crate::error::{Error, Result};
use crate::problem::{InitialCondition, PhysicalSetup, LN_INV_EPS};
use crate::quadrature::{
    self, graded_mesh, growth_probe, integrate, mesh, solve_quadrature, MAX_PANELS,
};
use crate::series::{SeriesResult, SeriesStatus};
use crate::specfun::{bessel_i0_scaled, bessel_k0, bessel_k0_scaled, digamma_int, CompensatedSum};

const MAX_MOMENTS: usize = 2_000;

/// The three parts of the solution, each already multiplied by
/// `e^{-r^2 / 4 kappa t} / 2 kappa t`, so that `total` is their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDecomposition {
    pub log_term: f64,
    /// Minus the scaled K0 integral.
    pub k0_term: f64,
    pub psi_series: SeriesResult,
    /// The n = 0 addend of the psi series, `psi(1) Z_1(h)` scaled.
    pub first_psi_term: f64,
    pub total: f64,
}

/// Which form of the first term and of the series start to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogVariant {
    /// First term `ln(4 kappa t / r) int y h e^{-y^2/4 kappa t} I0(z) dy`; when
    /// false the I0 factor is dropped.
    pub first_term_with_i0: bool,
    /// Start the psi series at n = 0 rather than n = 1.
    pub series_from_zero: bool,
}

impl LogVariant {
    pub const DERIVED: LogVariant = LogVariant {
        first_term_with_i0: true,
        series_from_zero: true,
    };

    pub const PRINTED: LogVariant = LogVariant {
        first_term_with_i0: false,
        series_from_zero: false,
    };
}

fn check_base(h: &InitialCondition) -> Result<()> {
    if h.is_log_weighted() {
        return Err(Error::InvalidParameter(
            "expected the base profile h, not h ln r".into(),
        ));
    }
    h.validate()
}

fn gaussian_reach(setup: &PhysicalSetup) -> f64 {
    (setup.four_kt() * LN_INV_EPS).sqrt() + 10.0 * setup.kt().sqrt()
}

/// `Z_s(h) = int_0^inf h(y) y^s e^{-y^2 / 4 kappa t} dy`.
pub fn z_moment(h: &InitialCondition, s: f64, setup: &PhysicalSetup, tol: f64) -> Result<f64> {
    check_base(h)?;
    setup.validate()?;
    quadrature::check_tol(tol)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "moment order s = {s} must be > 0"
        )));
    }
    let t4 = setup.four_kt();
    // y^s e^{-y^2/T} peaks at sqrt(s T / 2); work relative to the peak value
    let peak = (0.5 * s * t4).sqrt();
    let ln_peak = s * peak.ln() - peak * peak / t4;
    let mut hi = peak + gaussian_reach(setup);
    if let Some(b) = h.support_bound() {
        hi = hi.min(b);
    }
    let lo = (peak - gaussian_reach(setup)).max(0.0).min(hi);
    let width = (0.5 * t4.sqrt()).min(0.5 * h.length_scale());
    let mut pts = mesh(lo, hi, width, &h.breakpoints());
    if lo > 0.0 {
        pts.insert(0, 0.0);
    }
    let f = |y: f64| {
        let hy = h.eval(y);
        if hy == 0.0 || y == 0.0 {
            return 0.0;
        }
        hy * (s * y.ln() - y * y / t4 - ln_peak).exp()
    };
    let r = integrate(f, &pts, tol, tol, MAX_PANELS)?;
    Ok(r.value * ln_peak.exp())
}

/// `int_0^inf y h(y) e^{-y^2 / 4 kappa t} K0(y r / 2 kappa t) dy`, r > 0.
pub fn k0_integral(h: &InitialCondition, setup: &PhysicalSetup, tol: f64) -> Result<f64> {
    k0_integral_with(h, setup, tol, 1.0)
}

/// [`k0_integral`] with the truncation point scaled by `reach_scale`.
pub fn k0_integral_with(
    h: &InitialCondition,
    setup: &PhysicalSetup,
    tol: f64,
    reach_scale: f64,
) -> Result<f64> {
    check_base(h)?;
    setup.validate()?;
    quadrature::check_tol(tol)?;
    if setup.r <= 0.0 {
        return Err(Error::domain("k0_integral", "r must be > 0"));
    }
    let t4 = setup.four_kt();
    let b = 2.0 * setup.r / t4;
    let mut hi = reach_scale * gaussian_reach(setup);
    if let Some(sb) = h.support_bound() {
        hi = hi.min(sb);
    }
    let delta = (setup.kt().sqrt().min(1.0) / 8.0).min(hi);
    let width = (0.5 * t4.sqrt()).min(0.5 * h.length_scale()).min(1.0 / b);
    let mut extra = h.breakpoints();
    extra.extend(graded_mesh(delta));
    let pts = mesh(0.0, hi, width, &extra);
    let f = |y: f64| {
        let hy = h.eval(y);
        if hy == 0.0 || y == 0.0 {
            return 0.0;
        }
        let z = b * y;
        let k = if z < 1.0 {
            bessel_k0(z).unwrap_or(f64::NAN) * (-y * y / t4).exp()
        } else {
            bessel_k0_scaled(z).unwrap_or(f64::NAN) * (-y * y / t4 - z).exp()
        };
        y * hy * k
    };
    Ok(integrate(f, &pts, tol, tol, MAX_PANELS)?.value)
}

/// `|I0(x) ln(x/2) - (-K0(x) + sum_{n=0}^{N} psi(n+1) (x/2)^{2n} / (n!)^2)|`.
pub fn i0_log_expansion_check(x: f64, n_terms: usize) -> Result<f64> {
    if !(x > 0.0 && x <= 10.0) {
        return Err(Error::domain(
            "i0_log_expansion_check",
            format!("x = {x} must lie in (0, 10]"),
        ));
    }
    if n_terms < 20 {
        return Err(Error::domain(
            "i0_log_expansion_check",
            "at least 20 terms are required",
        ));
    }
    let i0 = bessel_i0_scaled(x)? * x.exp();
    let lhs = i0 * (0.5 * x).ln();
    let q = 0.25 * x * x;
    let mut sum = CompensatedSum::new();
    sum.add(-bessel_k0(x)?);
    let mut coeff = 1.0;
    for n in 0..=n_terms {
        if n > 0 {
            coeff *= q / (n * n) as f64;
        }
        sum.add(coeff * digamma_int(n as u64 + 1)?);
    }
    Ok((lhs - sum.value()).abs())
}

/// u(r, t) for initial data `h(r) ln r` from the three-part decomposition.
pub fn u_log_weighted(
    h: &InitialCondition,
    setup: &PhysicalSetup,
    tol: f64,
) -> Result<LogDecomposition> {
    u_log_weighted_with(h, setup, tol, LogVariant::DERIVED)
}

pub fn u_log_weighted_with(
    h: &InitialCondition,
    setup: &PhysicalSetup,
    tol: f64,
    variant: LogVariant,
) -> Result<LogDecomposition> {
    check_base(h)?;
    setup.validate()?;
    quadrature::check_tol(tol)?;
    if setup.r <= 0.0 {
        return Err(Error::domain("u_log_weighted", "r must be > 0"));
    }
    if h.is_custom() {
        growth_probe(h, setup, quadrature::y_max(h, setup))?;
    }
    let t4 = setup.four_kt();
    let x = setup.x();
    let prefactor = 2.0 / t4 * (-x).exp();
    let log_factor = (t4 / setup.r).ln();
    // keep component errors well inside the overall tolerance
    let inner = (0.1 * tol).max(1e-13);
    let ((first, k0), series) = rayon::join(
        || {
            rayon::join(
                || -> Result<f64> {
                    if variant.first_term_with_i0 {
                        Ok(solve_quadrature(h, setup, inner)?.value)
                    } else {
                        Ok(prefactor * z_moment(h, 1.0, setup, inner)?)
                    }
                },
                || k0_integral(h, setup, inner),
            )
        },
        || psi_series(h, setup, inner, tol, prefactor),
    );
    let log_term = log_factor * first?;
    let k0_term = -prefactor * k0?;
    let (mut psi, first_psi_term) = series?;
    if !variant.series_from_zero {
        psi.value -= first_psi_term;
    }
    Ok(LogDecomposition {
        log_term,
        k0_term,
        psi_series: psi,
        first_psi_term,
        total: log_term + k0_term + psi.value,
    })
}

// sum_{n>=0} psi(n+1) / (4^n (n!)^2) (r / 2 kappa t)^{2n} Z_{2n+1}(h), scaled.
fn psi_series(
    h: &InitialCondition,
    setup: &PhysicalSetup,
    inner: f64,
    tol: f64,
    prefactor: f64,
) -> Result<(SeriesResult, f64)> {
    let x = setup.x();
    let b2 = (setup.r / (2.0 * setup.kt())).powi(2) / 4.0;
    let mut sum = CompensatedSum::new();
    let mut ln_coeff = 0.0;
    let mut first = 0.0;
    let mut prev = f64::INFINITY;
    for n in 0..MAX_MOMENTS {
        let nf = n as f64;
        if n > 0 {
            ln_coeff += b2.ln() - 2.0 * nf.ln();
        }
        let z = z_moment(h, 2.0 * nf + 1.0, setup, inner)?;
        let addend = prefactor * digamma_int(n as u64 + 1)? * z * ln_coeff.exp();
        if n == 0 {
            first = addend;
        }
        sum.add(addend);
        let size = addend.abs();
        let level = tol * sum.value().abs().max(1.0);
        if n >= 1 && size <= level && size <= prev && x / ((nf + 1.0) * (nf + 1.0)) < 0.5 {
            let rho = if prev > 0.0 {
                (size / prev).min(0.9)
            } else {
                0.0
            };
            return Ok((
                SeriesResult {
                    value: sum.value(),
                    terms_used: n + 1,
                    tail_estimate: size * rho / (1.0 - rho),
                    status: SeriesStatus::Converged,
                    routed_to_oracle: false,
                    closed_form_gap: None,
                },
                first,
            ));
        }
        prev = size;
    }
    Err(Error::NonConvergence {
        what: "psi moment series",
        budget: MAX_MOMENTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::SupportHint;
    use crate::quadrature::solve_quadrature_log;

    fn setup(kappa: f64, r: f64, t: f64) -> PhysicalSetup {
        PhysicalSetup::new(kappa, r, t).unwrap()
    }

    #[test]
    fn moments() {
        let one = InitialCondition::constant(1.0);
        for kt in [0.1, 0.5, 2.0] {
            let s = setup(1.0, 0.3, kt);
            let z1 = z_moment(&one, 1.0, &s, 1e-13).unwrap();
            assert!((z1 - 2.0 * kt).abs() < 1e-13 * (2.0 * kt));
            let z3 = z_moment(&one, 3.0, &s, 1e-13).unwrap();
            assert!((z3 - 2.0 * (2.0 * kt).powi(2)).abs() < 1e-12 * z3);
            let g = InitialCondition::gaussian(1.5).unwrap();
            let zg = z_moment(&g, 1.0, &s, 1e-13).unwrap();
            assert!((zg - 0.5 / (1.5 + 0.25 / kt)).abs() < 1e-14);
        }
    }

    #[test]
    fn k0_integral_reference() {
        // 30-digit tanh-sinh value of int y e^{-y^2/2} K0(y) dy
        let one = InitialCondition::constant(1.0);
        let s = setup(1.0, 1.0, 0.5);
        let v = k0_integral(&one, &s, 1e-12).unwrap();
        assert!((v - 0.461_455_316_241_865_25).abs() < 1e-11, "{v}");
        let w = k0_integral_with(&one, &s, 1e-12, 2.0).unwrap();
        assert!((v - w).abs() < 1e-12);
        let zero = InitialCondition::custom("zero", |_| 0.0, SupportHint::GaussianDominated);
        assert_eq!(k0_integral(&zero, &s, 1e-10).unwrap(), 0.0);
        assert!(k0_integral(&one, &setup(1.0, 0.0, 0.5), 1e-10).is_err());
    }

    #[test]
    fn expansion_identity() {
        assert!(i0_log_expansion_check(0.7, 30).unwrap() <= 1e-12);
        assert!(i0_log_expansion_check(2.0, 40).unwrap() <= 1e-11);
        assert!(i0_log_expansion_check(0.01, 20).unwrap() <= 1e-12);
        for x in [0.1, 0.7, 2.0, 5.0] {
            assert!(i0_log_expansion_check(x, 40).unwrap() <= 1e-11, "x={x}");
        }
    }

    #[test]
    fn decomposition_matches_direct_quadrature() {
        let g = InitialCondition::gaussian(1.0).unwrap();
        let s = setup(1.0, 0.7, 0.5);
        let d = u_log_weighted(&g, &s, 1e-10).unwrap();
        let q = solve_quadrature_log(&g, &s, 1e-12).unwrap();
        assert!((d.total - q.value).abs() < 1e-9, "{d:?} {q:?}");
        // dropping n = 0 removes exactly psi(1) Z_1 times the prefactor
        let z1 = z_moment(&g, 1.0, &s, 1e-13).unwrap();
        let pref = 2.0 / s.four_kt() * (-s.x()).exp();
        let e = crate::specfun::EULER_GAMMA;
        assert!((d.first_psi_term + e * z1 * pref).abs() < 1e-13);
    }
}
