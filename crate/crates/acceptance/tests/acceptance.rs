//! Acceptance criteria 1-9. One PASS/FAIL line each; the process fails if
//! any criterion does.

use std::time::{Duration, Instant};

use axidiff::args::{InjectArg, SelftestArgs};
use axidiff::Exit;
use axidiff_core::calibration;
use axidiff_core::fd::FDConfig;
use axidiff_core::log_kernel::{i0_log_expansion_check, u_log_weighted};
use axidiff_core::mellin::{u_contour, ContourConfig, MellinDescriptor};
use axidiff_core::quadrature::{solve_quadrature, solve_quadrature_log};
use axidiff_core::selftest::{
    self, fd_oracle_distance, laguerre_envelope_ratio, laguerre_pointwise_ratio, residual_orders,
};
use axidiff_core::series::{evaluate, SeriesKind, SeriesParams};
use axidiff_core::specfun::bessel_i0_scaled;
use axidiff_core::{InitialCondition, PhysicalSetup, Result};
use rayon::prelude::*;

const KINDS: [SeriesKind; 3] = [
    SeriesKind::BesselJ0,
    SeriesKind::BesselJ0Squared,
    SeriesKind::ProductIK,
];

type Criterion = (&'static str, fn() -> Result<Verdict>);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn order_v(kind: SeriesKind) -> f64 {
    if kind == SeriesKind::ProductIK {
        0.3
    } else {
        0.0
    }
}

fn setup(kappa: f64, r: f64, t: f64) -> Result<PhysicalSetup> {
    PhysicalSetup::new(kappa, r, t)
}

fn series(kind: SeriesKind, kappa: f64, r: f64, t: f64, tol: f64) -> Result<f64> {
    let p = SeriesParams::new(1.0, setup(kappa, r, t)?)
        .with_v(order_v(kind))
        .with_tol(tol);
    Ok(evaluate(kind, &p)?.value)
}

fn grid() -> Vec<(SeriesKind, f64, f64, f64)> {
    let mut pts = Vec::new();
    for kind in KINDS {
        for kappa in [0.5, 1.0] {
            for t in [0.05, 0.5, 2.0] {
                for r in [0.0, 0.3, 1.0, 2.5] {
                    pts.push((kind, kappa, t, r));
                }
            }
        }
    }
    pts
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn oracle_agreement() -> Result<Verdict> {
    let start = Instant::now();
    let rows: Vec<(f64, f64)> = grid()
        .par_iter()
        .map(|&(kind, kappa, t, r)| -> Result<(f64, f64)> {
            let g = kind.initial_condition(1.0, order_v(kind))?;
            let q = solve_quadrature(&g, &setup(kappa, r, t)?, 1e-12)?.value;
            let s = series(kind, kappa, r, t, 1e-12)?;
            let contour_gap = if r >= 0.25 {
                let md = MellinDescriptor::for_initial_condition(&g)?;
                let st = setup(kappa, r, t)?;
                (u_contour(&md, &st, &ContourConfig::auto(&md, &st, 1e-10)?)?.value - s).abs()
            } else {
                0.0
            };
            Ok(((s - q).abs() / q.abs().max(1.0), contour_gap))
        })
        .collect::<Result<_>>()?;
    let sq = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let cs = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let took = start.elapsed();
    Ok(verdict(
        sq <= 1e-8 && cs <= 1e-6 && took < Duration::from_secs(30),
        format!(
            "{} points: |series-quadrature|/max(1,|u|) {sq:.2e} (<= 1e-8), |contour-series| {cs:.2e} (<= 1e-6), {} (< 30 s)",
            rows.len(),
            secs(took)
        ),
    ))
}

fn constant_calibration() -> Result<Verdict> {
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [
        calibration::j0_squared_half()?,
        calibration::j0_half()?,
        calibration::product_ik_factor()?,
    ] {
        let worst_ratio = d
            .rows
            .iter()
            .map(|r| (r.alternative_ratio() - 0.5).abs())
            .fold(0.0, f64::max);
        ok &= d.worst_adopted() <= 1e-8 && worst_ratio < 1e-6;
        parts.push(format!(
            "{} adopted {:.1e}, alternative/oracle = 0.5 +- {worst_ratio:.0e}",
            d.id,
            d.worst_adopted()
        ));
    }
    let arg = calibration::j0_squared_argument()?;
    let at_one = arg
        .rows
        .iter()
        .find(|r| r.r == 1.0)
        .expect("protocol includes r = 1");
    ok &= arg.worst_adopted() <= 1e-8 && at_one.alternative_deviation() >= 1e-2;
    parts.push(format!(
        "{} deviation at r=1 {:.3e} (>= 1e-2)",
        arg.id,
        at_one.alternative_deviation()
    ));
    let mutated = axidiff::selftest(&SelftestArgs {
        filter: Some("series".into()),
        inject: Some(InjectArg::HalfJ0sq),
    });
    ok &= mutated.exit != Exit::Ok;
    parts.push(format!("mutated selftest exit {}", mutated.exit.code()));
    Ok(verdict(ok, parts.join("; ")))
}

fn axis_limit() -> Result<Verdict> {
    let start = Instant::now();
    let g = InitialCondition::bessel_j0_squared(1.0)?;
    let (mut to_oracle, mut to_closed) = (0.0f64, 0.0f64);
    for kt in [0.1, 0.25, 1.0] {
        let s = series(SeriesKind::BesselJ0Squared, 1.0, 1e-8, kt, 1e-13)?;
        let q = solve_quadrature(&g, &setup(1.0, 0.0, kt)?, 1e-13)?.value;
        to_oracle = to_oracle.max((s - q).abs());
        to_closed = to_closed.max((s - bessel_i0_scaled(2.0 * kt)?).abs());
    }
    let alt = (bessel_i0_scaled(1.0)? - bessel_i0_scaled(2.0)?).abs();
    let took = start.elapsed();
    Ok(verdict(
        to_oracle <= 1e-9 && to_closed <= 1e-9 && alt >= 1e-2 && took < Duration::from_secs(5),
        format!(
            "series(r=1e-8) vs oracle(r=0) {to_oracle:.2e}, vs e^(-2w)I0(2w) {to_closed:.2e} (<= 1e-9); e^(-w)I0(w) off by {alt:.3e} at w=1; {}",
            secs(took)
        ),
    ))
}

fn log_decomposition() -> Result<Verdict> {
    let start = Instant::now();
    let mut cases = Vec::new();
    for h in [
        InitialCondition::gaussian(1.0)?,
        InitialCondition::uniform_disk(1.0)?,
    ] {
        for t in [0.25, 1.0] {
            for r in [0.25, 0.7, 1.5] {
                cases.push((h.clone(), t, r));
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|(h, t, r)| -> Result<f64> {
            let s = setup(1.0, *r, *t)?;
            let q = solve_quadrature_log(h, &s, 1e-12)?.value;
            Ok((u_log_weighted(h, &s, 1e-10)?.total - q).abs() / q.abs().max(1.0))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let identity = [0.1, 0.7, 2.0, 5.0]
        .iter()
        .map(|&x| i0_log_expansion_check(x, 40))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let took = start.elapsed();
    Ok(verdict(
        worst <= 1e-7 && identity <= 1e-11 && took < Duration::from_secs(20),
        format!(
            "decomposition vs log quadrature {worst:.2e} (<= 1e-7), expansion identity {identity:.2e} (<= 1e-11), {}",
            secs(took)
        ),
    ))
}

fn pde_residual() -> Result<Verdict> {
    let start = Instant::now();
    let (r, t) = (0.7, 0.5);
    let gauss = InitialCondition::gaussian(1.0)?;
    let disk = InitialCondition::uniform_disk(1.0)?;
    let md = MellinDescriptor::j0_squared(1.0)?;
    let cfg = ContourConfig::auto(&md, &setup(1.0, r, t)?, 1e-12)?;
    let mut orders: Vec<(&str, [f64; 2])> = vec![
        (
            "quadrature/gaussian",
            residual_orders(
                |r, t| Ok(solve_quadrature(&gauss, &setup(1.0, r, t)?, 1e-13)?.value),
                1.0,
                r,
                t,
            )?,
        ),
        (
            "quadrature/disk",
            residual_orders(
                |r, t| Ok(solve_quadrature(&disk, &setup(1.0, r, t)?, 1e-13)?.value),
                1.0,
                r,
                t,
            )?,
        ),
        (
            "contour/j0sq",
            residual_orders(
                |r, t| Ok(u_contour(&md, &setup(1.0, r, t)?, &cfg)?.value),
                1.0,
                r,
                t,
            )?,
        ),
        (
            "log/gaussian",
            residual_orders(
                |r, t| Ok(u_log_weighted(&gauss, &setup(1.0, r, t)?, 1e-13)?.total),
                1.0,
                r,
                t,
            )?,
        ),
    ];
    for (kind, name) in KINDS
        .iter()
        .zip(["series/j0", "series/j0sq", "series/ivkv"])
    {
        orders.push((
            name,
            residual_orders(|r, t| series(*kind, 1.0, r, t, 1e-14), 1.0, r, t)?,
        ));
    }
    let (worst_name, worst) = orders
        .iter()
        .map(|(n, o)| (*n, o[0].min(o[1])))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let took = start.elapsed();
    Ok(verdict(
        worst >= 1.8 && took < Duration::from_secs(10),
        format!(
            "{} methods, lowest observed order {worst:.3} ({worst_name}) (>= 1.8), {}",
            orders.len(),
            secs(took)
        ),
    ))
}

fn fd_referee() -> Result<Verdict> {
    let start = Instant::now();
    let fine = FDConfig::new(12.0, 2400, 0.5, 800);
    let coarse = FDConfig::new(12.0, 1200, 0.5, 400);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, g) in [
        ("gaussian", InitialCondition::gaussian(1.0)?),
        ("disk", InitialCondition::uniform_disk(1.0)?),
    ] {
        let e_fine = fd_oracle_distance(&g, 1.0, &fine)?;
        let ratio = fd_oracle_distance(&g, 1.0, &coarse)? / e_fine;
        ok &= e_fine <= 1e-4 && ratio >= 3.5;
        parts.push(format!(
            "{name} max error {e_fine:.2e} (<= 1e-4), Richardson ratio {ratio:.3} (>= 3.5)"
        ));
    }
    let took = start.elapsed();
    ok &= took < Duration::from_secs(60);
    parts.push(secs(took));
    Ok(verdict(ok, parts.join("; ")))
}

fn special_functions() -> Result<Verdict> {
    let start = Instant::now();
    let suite = selftest::run(&selftest::SelftestOptions {
        filter: Some("specfun".into()),
        mutation: None,
    })?;
    let failed: Vec<&str> = suite.iter().filter(|o| !o.passed).map(|o| o.name).collect();
    let mut worst = (0.0f64, 0.0, 0);
    let mut envelope = 0.0f64;
    for x in [0.5, 1.0, 4.0] {
        for n in [100, 200] {
            let ratio = laguerre_pointwise_ratio(n, x)?;
            if ratio > worst.0 {
                worst = (ratio, x, n);
            }
            envelope = envelope.max(laguerre_envelope_ratio(n, x)?);
        }
    }
    let took = start.elapsed();
    Ok(verdict(
        failed.is_empty() && worst.0 <= 0.6 && took < Duration::from_secs(10),
        format!(
            "{}/{} invariants pass{}; pointwise e_4n/e_n max {:.3} at x={}, n={} (<= 0.6); per-period envelope ratio max {envelope:.3}; {}",
            suite.len() - failed.len(),
            suite.len(),
            if failed.is_empty() { String::new() } else { format!(" (failed: {})", failed.join(", ")) },
            worst.0,
            worst.1,
            worst.2,
            secs(took)
        ),
    ))
}

fn rapid_convergence() -> Result<Verdict> {
    let mut max_terms = 0;
    let mut max_tail = 0.0f64;
    let mut slowest = Duration::ZERO;
    for kind in KINDS {
        for w in [0.05f64, 0.25, 0.5] {
            for x in [0.0f64, 1.0, 2.0, 4.0] {
                let r = (4.0 * w * x).sqrt();
                let p = SeriesParams::new(1.0, setup(1.0, r, w)?)
                    .with_v(order_v(kind))
                    .with_tol(1e-10);
                let res = evaluate(kind, &p)?;
                max_terms = max_terms.max(res.terms_used);
                max_tail = max_tail.max(res.tail_estimate);
                let reps = 50;
                let start = Instant::now();
                for _ in 0..reps {
                    std::hint::black_box(evaluate(kind, std::hint::black_box(&p))?);
                }
                slowest = slowest.max(start.elapsed() / reps);
            }
        }
    }
    Ok(verdict(
        max_terms <= 40 && max_tail <= 1e-10 && slowest < Duration::from_millis(1),
        format!(
            "w <= 0.5, x <= 4: at most {max_terms} terms (<= 40), tail {max_tail:.2e} (<= 1e-10), slowest point {:.1} us (< 1 ms)",
            slowest.as_secs_f64() * 1e6
        ),
    ))
}

fn contour_robustness() -> Result<Verdict> {
    let rows: Vec<(f64, f64)> = grid()
        .into_iter()
        .filter(|p| p.3 >= 0.25)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(kind, kappa, t, r)| -> Result<(f64, f64)> {
            let g = kind.initial_condition(1.0, order_v(kind))?;
            let md = MellinDescriptor::for_initial_condition(&g)?;
            let s = setup(kappa, r, t)?;
            let lo = u_contour(&md, &s, &ContourConfig::auto_at(&md, &s, 1e-10, 0.4)?)?.value;
            let cfg = ContourConfig::auto_at(&md, &s, 1e-10, 0.6)?;
            let hi = u_contour(&md, &s, &cfg)?.value;
            let doubled = u_contour(&md, &s, &cfg.with_tau_max(2.0 * cfg.tau_max))?.value;
            Ok(((lo - hi).abs(), (doubled - hi).abs() / cfg.tol))
        })
        .collect::<Result<_>>()?;
    let shift = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let doubling = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(verdict(
        shift <= 1e-8 && doubling <= 1.0,
        format!(
            "{} points: c 0.4 -> 0.6 changes u by {shift:.2e} (<= 1e-8); tau_max doubling change / tol {doubling:.2e} (<= 1)",
            rows.len()
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle agreement", oracle_agreement),
        ("constant calibration", constant_calibration),
        ("axis limit", axis_limit),
        ("log decomposition", log_decomposition),
        ("PDE residual order", pde_residual),
        ("finite-difference referee", fd_referee),
        ("special functions", special_functions),
        ("rapid convergence", rapid_convergence),
        ("contour robustness", contour_robustness),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        if !v.passed {
            failures += 1;
        }
        println!(
            "{} criterion {} ({name}): {}",
            if v.passed { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
