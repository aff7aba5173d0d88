//! Ground-truth evaluation of the heat-kernel form
//!
//! ```text
//! u(r, t) = (1 / 2 kappa t) e^{-r^2 / 4 kappa t} int_0^inf y g(y) I0(y r / 2 kappa t) e^{-y^2 / 4 kappa t} dy
//! ```
//!
//! The exponentials are always paired with the Bessel factor as
//! `e^{-(y - r)^2 / 4 kappa t} [e^{-x} I0(x)]`, so nothing overflows however
//! large `y r / kappa t` gets.

mod gauss_kronrod;

pub use gauss_kronrod::{integrate, QuadratureResult};

use crate::error::{Error, Result};
use crate::problem::{InitialCondition, PhysicalSetup, LN_INV_EPS};
use crate::specfun::bessel_i0_scaled;

/// Panel budget shared by all oracle integrations.
pub const MAX_PANELS: usize = 20_000;

/// Number of probe points in the growth check for user profiles.
const GROWTH_PROBES: usize = 32;

/// Knobs that change the mesh without changing the answer; used to build two
/// independent mesh families for cross-checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Multiplies the Gaussian half-width used for the upper truncation point.
    pub y_max_scale: f64,
    /// Number of initial panels per kernel width.
    pub panels_per_width: usize,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            y_max_scale: 1.0,
            panels_per_width: 1,
        }
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if (1e-13..=1e-4).contains(&tol) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tol = {tol} must lie in [1e-13, 1e-4]"
        )))
    }
}

/// Upper truncation point: Gaussian damping below machine epsilon, clipped to
/// the support of `g` when it has one.
pub fn y_max(g: &InitialCondition, setup: &PhysicalSetup) -> f64 {
    gaussian_y_max(g, setup, 1.0)
}

fn gaussian_y_max(g: &InitialCondition, setup: &PhysicalSetup, scale: f64) -> f64 {
    let gauss =
        setup.r + scale * ((setup.four_kt() * LN_INV_EPS).sqrt() + 10.0 * setup.kt().sqrt());
    match g.support_bound() {
        Some(b) => b.min(gauss),
        None => gauss,
    }
}

/// Sorted breakpoints on `[lo, hi]`: uniform panels of width at most `width`
/// plus every interior point of `extra`.
pub(crate) fn mesh(lo: f64, hi: f64, width: f64, extra: &[f64]) -> Vec<f64> {
    let n = ((hi - lo) / width)
        .ceil()
        .clamp(1.0, (MAX_PANELS / 4) as f64) as usize;
    let mut pts: Vec<f64> = (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect();
    pts.extend(extra.iter().copied().filter(|&p| p > lo && p < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Geometric breakpoints `delta 2^{-k}` accumulating at zero.
pub(crate) fn graded_mesh(delta: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..48).rev().map(|k| delta * 0.5f64.powi(k)).collect();
    pts.insert(0, 0.0);
    pts
}

/// Rejects user profiles that the Gaussian kernel cannot tame.
///
/// `|y g(y)|` is sampled at logarithmically spaced points up to `y_max` and
/// must stay below `1e6 e^{y^2 / 4 kappa t}`.
pub fn growth_probe(g: &InitialCondition, setup: &PhysicalSetup, y_max: f64) -> Result<()> {
    let four_kt = setup.four_kt();
    let lo = (y_max * 1e-6).ln();
    let hi = y_max.ln();
    for k in 0..GROWTH_PROBES {
        let y = (lo + (hi - lo) * k as f64 / (GROWTH_PROBES - 1) as f64).exp();
        let magnitude = (y * g.eval(y)).abs();
        // compare in log space; the bound itself may overflow
        let ok = magnitude.is_finite()
            && (magnitude == 0.0
                || magnitude.ln() < y * y / four_kt + 6.0 * std::f64::consts::LN_10);
        if !ok {
            return Err(Error::InvalidGrowth { y, magnitude });
        }
    }
    Ok(())
}

/// The paired integrand `(2 / T) y g(y) e^{-(y - r)^2 / T} e^{-x} I0(x)`,
/// `T = 4 kappa t`, `x = 2 y r / T`.
pub fn kernel(setup: &PhysicalSetup, y: f64, gy: f64) -> f64 {
    if gy == 0.0 {
        return 0.0;
    }
    let t4 = setup.four_kt();
    let d = y - setup.r;
    2.0 / t4
        * y
        * gy
        * (-d * d / t4).exp()
        * bessel_i0_scaled(2.0 * y * setup.r / t4).unwrap_or(f64::NAN)
}

/// Evaluates `u(r, t)` for initial data `g` to `tol * max(1, |u|)`.
pub fn solve_quadrature(
    g: &InitialCondition,
    setup: &PhysicalSetup,
    tol: f64,
) -> Result<QuadratureResult> {
    solve_quadrature_with(g, setup, tol, MeshOptions::default())
}

/// [`solve_quadrature`] with an explicit mesh family.
pub fn solve_quadrature_with(
    g: &InitialCondition,
    setup: &PhysicalSetup,
    tol: f64,
    opts: MeshOptions,
) -> Result<QuadratureResult> {
    check_tol(tol)?;
    setup.validate()?;
    g.validate()?;
    let hi = gaussian_y_max(g, setup, opts.y_max_scale);
    if g.is_custom() {
        growth_probe(g, setup, hi)?;
    }
    let breaks = breakpoints(g, setup, hi, opts);
    let result = integrate(
        |y| kernel(setup, y, g.eval(y)),
        &breaks,
        tol,
        tol,
        MAX_PANELS,
    );
    match result {
        Err(Error::Domain { .. }) if g.is_custom() => Err(Error::InvalidGrowth {
            y: f64::NAN,
            magnitude: f64::INFINITY,
        }),
        other => other,
    }
}

/// Evaluates `u(r, t)` for initial data `h(r) ln r`.
pub fn solve_quadrature_log(
    h: &InitialCondition,
    setup: &PhysicalSetup,
    tol: f64,
) -> Result<QuadratureResult> {
    solve_quadrature_log_with(h, setup, tol, MeshOptions::default())
}

/// [`solve_quadrature_log`] with an explicit mesh family.
pub fn solve_quadrature_log_with(
    h: &InitialCondition,
    setup: &PhysicalSetup,
    tol: f64,
    opts: MeshOptions,
) -> Result<QuadratureResult> {
    if h.is_log_weighted() {
        return Err(Error::InvalidParameter(
            "solve_quadrature_log takes the base profile h, not h ln r".into(),
        ));
    }
    let g = InitialCondition::log_weighted(h.clone())?;
    solve_quadrature_with(&g, setup, tol, opts)
}

fn breakpoints(
    g: &InitialCondition,
    setup: &PhysicalSetup,
    hi: f64,
    opts: MeshOptions,
) -> Vec<f64> {
    let sd = setup.four_kt().sqrt();
    let mut width = sd.min(0.5 * g.length_scale());
    width /= opts.panels_per_width.max(1) as f64;
    // where the Gaussian factor leaves the underflow region
    let lo = (setup.r - (setup.four_kt() * LN_INV_EPS).sqrt())
        .max(0.0)
        .min(hi);
    let mut extra = g.breakpoints();
    extra.push(setup.r);
    if g.is_log_weighted() {
        let delta = setup.kt().sqrt().min(1.0) / 8.0;
        extra.extend(graded_mesh(delta.min(hi)));
    }
    let mut pts = mesh(lo, hi, width, &extra);
    if lo > 0.0 {
        pts.insert(0, 0.0);
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::SupportHint;

    fn setup(kappa: f64, r: f64, t: f64) -> PhysicalSetup {
        PhysicalSetup::new(kappa, r, t).unwrap()
    }

    #[test]
    fn constant_profile_is_preserved() {
        let g = InitialCondition::constant(1.0);
        for (r, t) in [(0.0, 0.25), (1.3, 0.01), (40.0, 3.0)] {
            let q = solve_quadrature(&g, &setup(1.0, r, t), 1e-12).unwrap();
            assert!((q.value - 1.0).abs() < 1e-12, "r={r} t={t} {q:?}");
        }
    }

    #[test]
    fn gaussian_closed_form() {
        let g = InitialCondition::gaussian(1.0).unwrap();
        let q = solve_quadrature(&g, &setup(1.0, 0.0, 0.25), 1e-12).unwrap();
        assert!((q.value - 0.5).abs() < 1e-12);
        assert!(q.abs_error_estimate <= 1e-12);
    }

    #[test]
    fn disk_at_axis() {
        let g = InitialCondition::uniform_disk(1.0).unwrap();
        for t in [0.05, 0.25, 2.0] {
            let q = solve_quadrature(&g, &setup(1.0, 0.0, t), 1e-12).unwrap();
            assert!((q.value - (1.0 - (-0.25 / t).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn tolerance_and_log_base_are_checked() {
        let g = InitialCondition::gaussian(1.0).unwrap();
        let s = setup(1.0, 0.0, 0.25);
        assert!(solve_quadrature(&g, &s, 1e-15).is_err());
        assert!(solve_quadrature(&g, &s, 1e-3).is_err());
        let l = InitialCondition::log_weighted(g).unwrap();
        assert!(solve_quadrature_log(&l, &s, 1e-10).is_err());
    }

    #[test]
    fn fast_growing_custom_profile_is_rejected() {
        let g = InitialCondition::custom(
            "exp-square",
            |y| (2.0 * y * y).exp(),
            SupportHint::GaussianDominated,
        );
        let r = solve_quadrature(&g, &setup(1.0, 0.5, 0.25), 1e-10);
        assert!(matches!(r, Err(Error::InvalidGrowth { .. })), "{r:?}");
        let mild =
            InitialCondition::custom("poly", |y| 1.0 + y * y, SupportHint::GaussianDominated);
        // u = 1 + r^2 + 4 kappa t for g = 1 + r^2
        let q = solve_quadrature(&mild, &setup(1.0, 0.5, 0.25), 1e-12).unwrap();
        assert!((q.value - 2.25).abs() < 1e-11);
    }
}
