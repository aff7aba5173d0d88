//! Frozen reference values from 30-digit tanh-sinh quadrature and closed forms.

#![allow(clippy::excessive_precision)]

use axidiff_core::log_kernel::{k0_integral, u_log_weighted};
use axidiff_core::quadrature::{solve_quadrature, solve_quadrature_log};
use axidiff_core::series::{u_bessel_j0, u_bessel_j0_squared, u_product_ik, SeriesParams};
use axidiff_core::specfun::bessel_j0;
use axidiff_core::{InitialCondition, PhysicalSetup};

fn setup(kappa: f64, r: f64, t: f64) -> PhysicalSetup {
    PhysicalSetup::new(kappa, r, t).unwrap()
}

fn close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol * want.abs().max(1.0),
        "got {got:.17e}, want {want:.17e}"
    );
}

#[test]
fn gaussian_closed_form() {
    for (c, kappa, r, t) in [
        (1.0f64, 1.0, 0.0, 0.25),
        (2.0, 0.5, 1.3, 0.4),
        (0.3, 2.0, 4.0, 1.5),
    ] {
        let d = 1.0 + 4.0 * c * kappa * t;
        let want = (-c * r * r / d).exp() / d;
        let g = InitialCondition::gaussian(c).unwrap();
        close(
            solve_quadrature(&g, &setup(kappa, r, t), 1e-12)
                .unwrap()
                .value,
            want,
            1e-12,
        );
    }
}

#[test]
fn disk_values() {
    let g = InitialCondition::uniform_disk(1.0).unwrap();
    for (kappa, t, r, want) in [
        (1.0, 0.25, 0.5, 0.545737098862241793090322001874),
        (1.0, 0.1, 1.5, 0.0961286549646269887145503853186),
        (0.5, 2.0, 2.5, 0.0556159673494495962064289426315),
    ] {
        close(
            solve_quadrature(&g, &setup(kappa, r, t), 1e-12)
                .unwrap()
                .value,
            want,
            1e-12,
        );
    }
}

#[test]
fn bessel_j0_closed_form() {
    for (kappa, r, t) in [(1.0f64, 0.0, 0.25), (0.5, 1.7, 0.8), (1.0, 3.0, 2.0)] {
        let want = (-kappa * t).exp() * bessel_j0(r).unwrap();
        let p = SeriesParams::new(1.0, setup(kappa, r, t));
        close(u_bessel_j0(&p).unwrap().value, want, 1e-12);
        let g = InitialCondition::bessel_j0(1.0).unwrap();
        close(
            solve_quadrature(&g, &setup(kappa, r, t), 1e-12)
                .unwrap()
                .value,
            want,
            1e-11,
        );
    }
}

#[test]
fn bessel_j0_squared_value() {
    let want = 0.354561402043056922247255300557;
    let p = SeriesParams::new(1.0, setup(1.0, 1.0, 0.5));
    close(u_bessel_j0_squared(&p).unwrap().value, want, 1e-12);
}

#[test]
fn product_ik_values() {
    for (kappa, t, r, v, want) in [
        (1.0, 0.5, 0.7, 0.3, 0.431529574534443245467052884749),
        (0.5, 0.05, 0.3, 0.7, 0.576599939347056818589095241786),
    ] {
        let p = SeriesParams::new(1.0, setup(kappa, r, t)).with_v(v);
        close(u_product_ik(&p).unwrap().value, want, 1e-12);
        let g = InitialCondition::product_ik(1.0, v).unwrap();
        close(
            solve_quadrature(&g, &setup(kappa, r, t), 1e-12)
                .unwrap()
                .value,
            want,
            1e-11,
        );
    }
}

#[test]
fn log_weighted_values() {
    let gauss = InitialCondition::gaussian(1.0).unwrap();
    let disk = InitialCondition::uniform_disk(1.0).unwrap();
    for (h, kappa, t, r, want) in [
        (&gauss, 1.0, 0.5, 0.7, -0.127771552557725021269363293028),
        (&disk, 1.0, 0.25, 0.5, -0.3266077330748976294733498241),
    ] {
        let s = setup(kappa, r, t);
        close(
            solve_quadrature_log(h, &s, 1e-12).unwrap().value,
            want,
            1e-12,
        );
        close(u_log_weighted(h, &s, 1e-12).unwrap().total, want, 1e-11);
    }
}

#[test]
fn k0_weighted_integral() {
    let one = InitialCondition::constant(1.0);
    let got = k0_integral(&one, &setup(1.0, 1.0, 0.5), 1e-12).unwrap();
    close(got, 0.461455316241865234416424687914, 1e-12);
}
