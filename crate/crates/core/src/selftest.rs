//! Executable invariant suite.
//!
//! Every property measures one deviation and compares it with a threshold.
//! [`Mutation`] deliberately breaks a constant so that the suite can be shown
//! to notice.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fd::{
    initial_values, solve_fd, solve_fd_monitored, FDConfig, OuterBoundary, RadialProfile,
};
use crate::log_kernel::{
    i0_log_expansion_check, u_log_weighted, u_log_weighted_with, z_moment, LogVariant,
};
use crate::mellin::{integrand, integrand_whittaker, u_contour, ContourConfig, MellinDescriptor};
use crate::problem::{InitialCondition, PhysicalSetup};
use crate::quadrature::{
    solve_quadrature, solve_quadrature_log, solve_quadrature_with, MeshOptions,
};
use crate::series::{
    u_bessel_j0, u_bessel_j0_squared_with, u_bessel_j0_with, u_product_ik_with, Constants,
    SeriesKind, SeriesParams,
};
use crate::specfun::{
    bessel_i0_scaled, bessel_j0, digamma_int, gamma_real, hyp1f1_real, laguerre, laguerre_asymp,
    sin_pi, Accuracy,
};

pub const MODULES: [&str; 6] = [
    "specfun",
    "quadrature",
    "series",
    "mellin",
    "log_kernel",
    "fd",
];

/// A deliberately wrong constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Extra factor 1/2 on the J0^2 series.
    HalfJ0Squared,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestOptions {
    /// Run only properties of this module.
    pub filter: Option<String>,
    pub mutation: Option<Mutation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Set when the check itself returned an error.
    pub error: Option<String>,
}

impl PropertyOutcome {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        match &self.error {
            Some(e) => format!("{verdict} {}/{}: error: {e}", self.module, self.name),
            None => format!(
                "{verdict} {}/{}: {:.3e} {op} {:.1e}",
                self.module, self.name, self.measured, self.threshold
            ),
        }
    }
}

struct Context {
    constants: Constants,
}

type Check = fn(&Context) -> Result<f64>;

struct Property {
    module: &'static str,
    name: &'static str,
    bound: Bound,
    threshold: f64,
    check: Check,
}

const fn at_most(
    module: &'static str,
    name: &'static str,
    threshold: f64,
    check: Check,
) -> Property {
    Property {
        module,
        name,
        bound: Bound::AtMost,
        threshold,
        check,
    }
}

const fn at_least(
    module: &'static str,
    name: &'static str,
    threshold: f64,
    check: Check,
) -> Property {
    Property {
        module,
        name,
        bound: Bound::AtLeast,
        threshold,
        check,
    }
}

fn setup(kappa: f64, r: f64, t: f64) -> Result<PhysicalSetup> {
    PhysicalSetup::new(kappa, r, t)
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

/// Observed orders `log2(R(d) / R(d/2))` of the central-difference residual
/// `kappa (u_rr + u_r / r) - u_t` on the five-point stencil around `(r, t)`,
/// for `d = 1e-2, 5e-3, 2.5e-3`.
pub fn residual_orders(
    f: impl Fn(f64, f64) -> Result<f64>,
    kappa: f64,
    r: f64,
    t: f64,
) -> Result<[f64; 2]> {
    let residual = |d: f64| -> Result<f64> {
        let u0 = f(r, t)?;
        let (up, um) = (f(r + d, t)?, f(r - d, t)?);
        let ut = (f(r, t + d)? - f(r, t - d)?) / (2.0 * d);
        Ok((kappa * ((up - 2.0 * u0 + um) / (d * d) + (up - um) / (2.0 * d * r)) - ut).abs())
    };
    let e = [residual(1e-2)?, residual(5e-3)?, residual(2.5e-3)?];
    Ok([(e[0] / e[1]).log2(), (e[1] / e[2]).log2()])
}

/// Ratio of the largest `|L_k(x) - asymptote|` over one oscillation period
/// starting at `4n` to the same quantity starting at `n`.
pub fn laguerre_envelope_ratio(n: u64, x: f64) -> Result<f64> {
    let envelope = |n: u64| -> Result<f64> {
        let period = (2.0 * PI * (n as f64 / x).sqrt()).ceil() as u64;
        max_of((n..=n + period).map(|k| Ok((laguerre(k, x) - laguerre_asymp(k, x)?).abs())))
    };
    Ok(envelope(4 * n)? / envelope(n)?)
}

/// Pointwise ratio `e_{4n} / e_n`, `e_n = |L_n(x) - asymptote|`.
pub fn laguerre_pointwise_ratio(n: u64, x: f64) -> Result<f64> {
    let e = |n: u64| -> Result<f64> { Ok((laguerre(n, x) - laguerre_asymp(n, x)?).abs()) };
    Ok(e(4 * n)? / e(n)?)
}

fn builtin_profiles() -> Result<Vec<InitialCondition>> {
    Ok(vec![
        InitialCondition::gaussian(1.0)?,
        InitialCondition::uniform_disk(1.0)?,
        InitialCondition::bessel_j0(1.0)?,
        InitialCondition::bessel_j0_squared(1.0)?,
        InitialCondition::product_ik(1.0, 0.3)?,
    ])
}

fn series_value(kind: SeriesKind, p: &SeriesParams, c: &Constants) -> Result<f64> {
    Ok(match kind {
        SeriesKind::BesselJ0 => u_bessel_j0_with(p, c)?,
        SeriesKind::BesselJ0Squared => u_bessel_j0_squared_with(p, c)?,
        SeriesKind::ProductIK => u_product_ik_with(p, c)?,
    }
    .value)
}

// ---- specfun

fn gamma_reflection(_: &Context) -> Result<f64> {
    max_of((1..=9).map(|k| {
        let x = k as f64 / 10.0;
        Ok((gamma_real(x)? * gamma_real(1.0 - x)? * sin_pi(x) / PI - 1.0).abs())
    }))
}

fn gamma_recurrence(_: &Context) -> Result<f64> {
    max_of((0..=78).map(|k| {
        let x = 0.5 + 0.25 * k as f64;
        Ok(rel(gamma_real(x + 1.0)?, x * gamma_real(x)?))
    }))
}

fn kummer_laguerre(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for a in 1..=10u64 {
        for k in 0..=20 {
            let x = 0.5 * k as f64;
            out.push(
                hyp1f1_real(a as f64, 1.0, x, Accuracy::tight())
                    .map(|f| rel(f, x.exp() * laguerre(a - 1, -x))),
            );
        }
    }
    max_of(out)
}

fn laguerre_generating(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for i in 0..=8 {
        for j in 0..=5 {
            let (x, w) = (0.5 * i as f64, 0.1 * j as f64);
            let mut sum = 0.0;
            let mut wn = 1.0;
            for n in 0..=60u64 {
                sum += laguerre(n, x) * wn;
                wn *= w / (n + 1) as f64;
            }
            out.push(bessel_j0(2.0 * (x * w).sqrt()).map(|j| (sum - w.exp() * j).abs()));
        }
    }
    max_of(out)
}

fn i0_bridge(_: &Context) -> Result<f64> {
    max_of((0..=40).map(|k| {
        let x = 0.5 * k as f64;
        Ok(rel(
            hyp1f1_real(0.5, 1.0, x, Accuracy::tight())?,
            x.exp() * bessel_i0_scaled(0.5 * x)?,
        ))
    }))
}

fn digamma_step(_: &Context) -> Result<f64> {
    max_of(
        (1..=200u64).map(|n| Ok((digamma_int(n + 1)? - (digamma_int(n)? + 1.0 / n as f64)).abs())),
    )
}

fn laguerre_envelope(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for x in [0.5, 1.0, 4.0] {
        for n in [100, 200] {
            out.push(laguerre_envelope_ratio(n, x));
        }
    }
    max_of(out)
}

// ---- quadrature

fn kt_scaling(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for g in builtin_profiles()? {
        for r in [0.3, 1.0] {
            let a = solve_quadrature(&g, &setup(0.7, r, 0.3)?, 1e-13)?.value;
            let b = solve_quadrature(&g, &setup(1.0, r, 0.7 * 0.3)?, 1e-13)?.value;
            out.push(Ok(rel(a, b)));
        }
    }
    max_of(out)
}

fn recovery(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for g in builtin_profiles()? {
        if matches!(g, InitialCondition::UniformDisk { .. }) {
            continue;
        }
        for r in [0.2, 0.7, 1.5] {
            out.push(Ok((solve_quadrature(&g, &setup(1.0, r, 1e-6)?, 1e-10)?
                .value
                - g.eval(r))
            .abs()));
        }
    }
    max_of(out)
}

fn radial_symmetry(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for g in builtin_profiles()? {
        for kt in [0.1, 1.0] {
            let u0 = solve_quadrature(&g, &setup(1.0, 0.0, kt)?, 1e-12)?.value;
            let u1 = solve_quadrature(&g, &setup(1.0, 1e-4, kt)?, 1e-12)?.value;
            out.push(Ok((u1 - u0).abs()));
        }
    }
    max_of(out)
}

/// Largest change under refinement divided by the reported error estimate.
fn refinement(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    let wide = MeshOptions {
        y_max_scale: 2.0,
        ..MeshOptions::default()
    };
    for g in builtin_profiles()? {
        for r in [0.0, 1.0] {
            let s = setup(1.0, r, 0.5)?;
            let base = solve_quadrature(&g, &s, 1e-10)?;
            let est = base.abs_error_estimate.max(f64::EPSILON * base.value.abs());
            let doubled = solve_quadrature_with(&g, &s, 1e-10, wide)?.value;
            let halved = solve_quadrature(&g, &s, 5e-11)?.value;
            out.push(Ok((doubled - base.value)
                .abs()
                .max((halved - base.value).abs())
                / est));
        }
    }
    max_of(out)
}

fn quadrature_residual(_: &Context) -> Result<f64> {
    let g = InitialCondition::gaussian(1.0)?;
    let o = residual_orders(
        |r, t| Ok(solve_quadrature(&g, &setup(1.0, r, t)?, 1e-13)?.value),
        1.0,
        1.0,
        0.5,
    )?;
    Ok(o[0].min(o[1]))
}

// ---- series

fn series_oracle(ctx: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for kind in [
        SeriesKind::BesselJ0,
        SeriesKind::BesselJ0Squared,
        SeriesKind::ProductIK,
    ] {
        let v = if kind == SeriesKind::ProductIK {
            0.3
        } else {
            0.0
        };
        let g = kind.initial_condition(1.0, v)?;
        for kappa in [0.5, 1.0] {
            for t in [0.05, 0.5, 2.0] {
                for r in [0.0, 0.3, 1.0, 2.5] {
                    let s = setup(kappa, r, t)?;
                    let q = solve_quadrature(&g, &s, 1e-12)?.value;
                    let p = SeriesParams::new(1.0, s).with_v(v);
                    out.push(Ok(
                        (series_value(kind, &p, &ctx.constants)? - q).abs() / q.abs().max(1.0)
                    ));
                }
            }
        }
    }
    max_of(out)
}

fn j0_closed_form(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for kappa in [0.5, 1.0] {
        for t in [0.05, 0.5, 2.0] {
            for r in [0.0, 0.3, 1.0, 2.5] {
                let p = SeriesParams::new(1.0, setup(kappa, r, t)?);
                let value = u_bessel_j0(&p)?.value;
                let closed = (-p.w()).exp() * bessel_j0(r)?;
                out.push(Ok(rel(value, closed)));
            }
        }
    }
    max_of(out)
}

fn axis_limit(ctx: &Context) -> Result<f64> {
    max_of([0.1, 0.25, 1.0].iter().map(|&kt| {
        let p = SeriesParams::new(1.0, setup(1.0, 1e-8, kt)?);
        Ok(
            (u_bessel_j0_squared_with(&p, &ctx.constants)?.value - bessel_i0_scaled(2.0 * kt)?)
                .abs(),
        )
    }))
}

fn term_economy(ctx: &Context) -> Result<f64> {
    let mut worst = 0usize;
    for kind in [
        SeriesKind::BesselJ0,
        SeriesKind::BesselJ0Squared,
        SeriesKind::ProductIK,
    ] {
        let v = if kind == SeriesKind::ProductIK {
            0.3
        } else {
            0.0
        };
        for kt in [0.25f64, 0.5, 1.0] {
            for x in [0.0f64, 1.0, 4.0] {
                let r = (4.0 * kt * x).sqrt();
                let p = SeriesParams::new(1.0, setup(1.0, r, kt)?)
                    .with_v(v)
                    .with_tol(1e-10);
                let res = match kind {
                    SeriesKind::BesselJ0 => u_bessel_j0_with(&p, &ctx.constants)?,
                    SeriesKind::BesselJ0Squared => u_bessel_j0_squared_with(&p, &ctx.constants)?,
                    SeriesKind::ProductIK => u_product_ik_with(&p, &ctx.constants)?,
                };
                worst = worst.max(res.terms_used);
            }
        }
    }
    Ok(worst as f64)
}

fn routing(ctx: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for kind in [
        SeriesKind::BesselJ0,
        SeriesKind::BesselJ0Squared,
        SeriesKind::ProductIK,
    ] {
        let v = if kind == SeriesKind::ProductIK {
            0.3
        } else {
            0.0
        };
        let g = kind.initial_condition(1.0, v)?;
        for kt in [4.0, 10.0] {
            let s = setup(1.0, 1.0, kt)?;
            let q = solve_quadrature(&g, &s, 1e-12)?.value;
            let p = SeriesParams::new(1.0, s).with_v(v);
            out.push(Ok((series_value(kind, &p, &ctx.constants)? - q).abs()));
        }
    }
    max_of(out)
}

fn series_residual(ctx: &Context) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for kind in [
        SeriesKind::BesselJ0,
        SeriesKind::BesselJ0Squared,
        SeriesKind::ProductIK,
    ] {
        let v = if kind == SeriesKind::ProductIK {
            0.3
        } else {
            0.0
        };
        let f = |r, t| {
            let p = SeriesParams::new(1.0, setup(1.0, r, t)?)
                .with_v(v)
                .with_tol(1e-14);
            series_value(kind, &p, &ctx.constants)
        };
        let o = residual_orders(f, 1.0, 1.0, 0.5)?;
        worst = worst.min(o[0]).min(o[1]);
    }
    Ok(worst)
}

// ---- mellin

fn abscissa_shift(_: &Context) -> Result<f64> {
    let md = MellinDescriptor::j0_squared(1.0)?;
    let mut out = Vec::new();
    for (r, t) in [(0.5, 0.25), (1.0, 0.5)] {
        let s = setup(1.0, r, t)?;
        let lo = u_contour(&md, &s, &ContourConfig::auto_at(&md, &s, 1e-10, 0.4)?)?.value;
        let hi = u_contour(&md, &s, &ContourConfig::auto_at(&md, &s, 1e-10, 0.6)?)?.value;
        out.push(Ok((lo - hi).abs()));
    }
    max_of(out)
}

fn conjugate_symmetry(_: &Context) -> Result<f64> {
    let md = MellinDescriptor::iv_kv(1.0, 0.3)?;
    let s = setup(1.0, 0.7, 0.5)?;
    max_of([0.1, 1.0, 7.5, 30.0].iter().map(|&tau| {
        let up = integrand(&md, &s, 0.5, tau)?;
        let down = integrand(&md, &s, 0.5, -tau)?;
        Ok((up - down.conj()).norm() / up.norm().max(f64::MIN_POSITIVE))
    }))
}

fn contour_series(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for kind in [
        SeriesKind::BesselJ0,
        SeriesKind::BesselJ0Squared,
        SeriesKind::ProductIK,
    ] {
        let v = if kind == SeriesKind::ProductIK {
            0.3
        } else {
            0.0
        };
        let g = kind.initial_condition(1.0, v)?;
        let md = MellinDescriptor::for_initial_condition(&g)?;
        for (r, t) in [(0.3, 0.05), (1.0, 0.5), (2.5, 2.0)] {
            let s = setup(1.0, r, t)?;
            let c = u_contour(&md, &s, &ContourConfig::auto(&md, &s, 1e-10)?)?.value;
            let p = SeriesParams::new(1.0, s).with_v(v);
            out.push(Ok((c - series_value(kind, &p, &Constants::DERIVED)?).abs()));
        }
    }
    max_of(out)
}

/// Change under doubling of `tau_max`, relative to the requested tolerance.
fn tau_doubling(_: &Context) -> Result<f64> {
    let md = MellinDescriptor::j0(1.0)?;
    let s = setup(1.0, 0.8, 0.5)?;
    let cfg = ContourConfig::auto(&md, &s, 1e-10)?;
    let a = u_contour(&md, &s, &cfg)?.value;
    let b = u_contour(&md, &s, &cfg.with_tau_max(2.0 * cfg.tau_max))?.value;
    Ok((a - b).abs() / cfg.tol)
}

fn whittaker_form(_: &Context) -> Result<f64> {
    let md = MellinDescriptor::gaussian(1.0)?;
    let s = setup(1.0, 0.9, 0.3)?;
    max_of([0.0, 0.5, 3.0, 12.0].iter().map(|&tau| {
        let a = integrand(&md, &s, 0.5, tau)?;
        let b = integrand_whittaker(&md, &s, 0.5, tau)?;
        Ok((a - b).norm() / a.norm())
    }))
}

// ---- log_kernel

fn decomposition(_: &Context) -> Result<f64> {
    let mut out = Vec::new();
    for h in [
        InitialCondition::gaussian(1.0)?,
        InitialCondition::uniform_disk(1.0)?,
    ] {
        for t in [0.25, 1.0] {
            for r in [0.25, 0.7, 1.5] {
                let s = setup(1.0, r, t)?;
                let q = solve_quadrature_log(&h, &s, 1e-12)?.value;
                out.push(Ok(
                    (u_log_weighted(&h, &s, 1e-10)?.total - q).abs() / q.abs().max(1.0)
                ));
            }
        }
    }
    max_of(out)
}

fn moment_consistency(_: &Context) -> Result<f64> {
    let h = InitialCondition::gaussian(1.0)?;
    max_of([0.25, 1.0].iter().map(|&t| {
        let s = setup(1.0, 0.5, t)?;
        let exact = 0.5 / (1.0 + 1.0 / s.four_kt());
        Ok(rel(z_moment(&h, 1.0, &s, 1e-13)?, exact))
    }))
}

fn index_sanity(_: &Context) -> Result<f64> {
    let h = InitialCondition::gaussian(1.0)?;
    let s = setup(1.0, 0.7, 0.25)?;
    let from_zero = u_log_weighted(&h, &s, 1e-12)?;
    let from_one = u_log_weighted_with(
        &h,
        &s,
        1e-12,
        LogVariant {
            series_from_zero: false,
            ..LogVariant::DERIVED
        },
    )?;
    let prefactor = (-s.x()).exp() * 2.0 / s.four_kt();
    let expected = digamma_int(1)? * z_moment(&h, 1.0, &s, 1e-13)? * prefactor;
    Ok(((from_zero.total - from_one.total) - expected)
        .abs()
        .max((from_zero.first_psi_term - expected).abs()))
}

fn log_identity(_: &Context) -> Result<f64> {
    max_of(
        [0.1, 0.7, 2.0, 5.0]
            .iter()
            .map(|&x| i0_log_expansion_check(x, 40)),
    )
}

// ---- fd

fn fd_disk_config() -> FDConfig {
    FDConfig::new(12.0, 480, 0.5, 100).with_boundary(OuterBoundary::NeumannZero)
}

fn fd_mass(_: &Context) -> Result<f64> {
    let g = InitialCondition::uniform_disk(1.0)?;
    let cfg = fd_disk_config();
    let radii: Vec<f64> = (0..=cfg.nr).map(|i| i as f64 * cfg.dr()).collect();
    let mut snap = RadialProfile {
        values: initial_values(&g, &radii),
        radii,
        t: 0.0,
    };
    let start = snap.mass();
    let mut worst = 0.0f64;
    solve_fd_monitored(&g, 1.0, &cfg, |_, _, u| {
        snap.values.copy_from_slice(u);
        worst = worst.max(rel(snap.mass(), start));
    })?;
    Ok(worst)
}

/// Largest excursion outside `[min g, max g]` over all steps.
fn fd_max_principle(_: &Context) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in [
        InitialCondition::uniform_disk(1.0)?,
        InitialCondition::gaussian(1.0)?,
    ] {
        solve_fd_monitored(&g, 1.0, &FDConfig::new(12.0, 2400, 0.5, 800), |_, _, u| {
            for &v in u {
                worst = worst.max(-v).max(v - 1.0);
            }
        })?;
    }
    Ok(worst)
}

/// Max-norm distance between the mesh solution and the oracle at the nodes
/// `r = 0, 0.25, ..., 6`.
pub fn fd_oracle_distance(g: &InitialCondition, kappa: f64, cfg: &FDConfig) -> Result<f64> {
    let p = solve_fd(g, kappa, cfg)?;
    let step = (0.25 / cfg.dr()).round() as usize;
    let mut worst = 0.0f64;
    for i in (0..p.radii.len()).step_by(step.max(1)) {
        let r = p.radii[i];
        if r > 6.0 {
            break;
        }
        let q = solve_quadrature(g, &setup(kappa, r, cfg.t_end)?, 1e-12)?.value;
        worst = worst.max((p.values[i] - q).abs());
    }
    Ok(worst)
}

fn fd_cross_method(_: &Context) -> Result<f64> {
    max_of(
        [
            InitialCondition::gaussian(1.0)?,
            InitialCondition::uniform_disk(1.0)?,
        ]
        .iter()
        .map(|g| fd_oracle_distance(g, 1.0, &FDConfig::new(12.0, 2400, 0.5, 800))),
    )
}

const PROPERTIES: &[Property] = &[
    at_most("specfun", "gamma-reflection", 1e-11, gamma_reflection),
    at_most("specfun", "gamma-recurrence", 1e-12, gamma_recurrence),
    at_most("specfun", "kummer-laguerre", 1e-10, kummer_laguerre),
    at_most(
        "specfun",
        "laguerre-generating-function",
        1e-10,
        laguerre_generating,
    ),
    at_most("specfun", "i0-hypergeometric-bridge", 1e-11, i0_bridge),
    at_most("specfun", "digamma-step", 0.0, digamma_step),
    at_most(
        "specfun",
        "laguerre-asymptotic-envelope-ratio",
        0.6,
        laguerre_envelope,
    ),
    at_most("quadrature", "kt-scaling", 1e-12, kt_scaling),
    at_most("quadrature", "initial-recovery", 1e-3, recovery),
    at_most("quadrature", "radial-symmetry", 1e-7, radial_symmetry),
    at_most("quadrature", "refinement-within-estimate", 1.0, refinement),
    at_least("quadrature", "pde-residual-order", 1.8, quadrature_residual),
    at_most("series", "oracle-agreement", 1e-8, series_oracle),
    at_most("series", "j0-closed-form", 1e-10, j0_closed_form),
    at_most("series", "j0sq-axis-limit", 1e-9, axis_limit),
    at_most("series", "terms-used", 40.0, term_economy),
    at_most("series", "large-w-routing", 1e-6, routing),
    at_least("series", "pde-residual-order", 1.8, series_residual),
    at_most("mellin", "abscissa-shift", 1e-8, abscissa_shift),
    at_most("mellin", "conjugate-symmetry", 1e-12, conjugate_symmetry),
    at_most("mellin", "contour-vs-series", 1e-6, contour_series),
    at_most("mellin", "tau-doubling-over-tol", 1.0, tau_doubling),
    at_most("mellin", "whittaker-form", 1e-12, whittaker_form),
    at_most("log_kernel", "decomposition", 1e-7, decomposition),
    at_most("log_kernel", "first-moment", 1e-12, moment_consistency),
    at_most("log_kernel", "series-index", 1e-12, index_sanity),
    at_most("log_kernel", "log-expansion-identity", 1e-11, log_identity),
    at_most("fd", "mass-conservation", 1e-6, fd_mass),
    at_most("fd", "maximum-principle", 1e-12, fd_max_principle),
    at_most("fd", "oracle-distance", 1e-4, fd_cross_method),
];

/// Runs the suite; outcomes come back in a fixed order.
pub fn run(opts: &SelftestOptions) -> Result<Vec<PropertyOutcome>> {
    if let Some(f) = &opts.filter {
        if !MODULES.contains(&f.as_str()) {
            return Err(Error::InvalidParameter(format!(
                "unknown module '{f}', expected one of {}",
                MODULES.join(", ")
            )));
        }
    }
    let ctx = Context {
        constants: match opts.mutation {
            None => Constants::DERIVED,
            Some(Mutation::HalfJ0Squared) => Constants {
                j0_squared_factor: 0.5 * Constants::DERIVED.j0_squared_factor,
                ..Constants::DERIVED
            },
        },
    };
    let selected: Vec<&Property> = PROPERTIES
        .iter()
        .filter(|p| opts.filter.as_deref().is_none_or(|f| f == p.module))
        .collect();
    Ok(selected
        .par_iter()
        .map(|p| {
            let (measured, error) = match (p.check)(&ctx) {
                Ok(m) => (m, None),
                Err(e) => (f64::NAN, Some(e.to_string())),
            };
            let passed = error.is_none()
                && match p.bound {
                    Bound::AtMost => measured <= p.threshold,
                    Bound::AtLeast => measured >= p.threshold,
                };
            PropertyOutcome {
                module: p.module,
                name: p.name,
                measured,
                threshold: p.threshold,
                bound: p.bound,
                passed,
                error,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specfun_properties_pass() {
        let out = run(&SelftestOptions {
            filter: Some("specfun".into()),
            mutation: None,
        })
        .unwrap();
        assert_eq!(out.len(), 7);
        for o in &out {
            assert!(o.passed, "{}", o.line());
        }
    }

    #[test]
    fn unknown_filter_is_rejected() {
        let opts = SelftestOptions {
            filter: Some("nope".into()),
            mutation: None,
        };
        assert!(run(&opts).is_err());
    }

    #[test]
    fn halved_constant_is_caught() {
        let out = run(&SelftestOptions {
            filter: Some("series".into()),
            mutation: Some(Mutation::HalfJ0Squared),
        })
        .unwrap();
        let oracle = out.iter().find(|o| o.name == "oracle-agreement").unwrap();
        assert!(!oracle.passed && oracle.measured > 0.1, "{}", oracle.line());
    }
}
