//! Measured comparison of alternative constant conventions against the
//! quadrature oracle.
//!
//! Each [`Discrepancy`] pits the convention the library uses against an
//! alternative form at a handful of points. The numbers are what the
//! `compare`-style tooling and the acceptance suite print.

use crate::error::Result;
use crate::log_kernel::{u_log_weighted_with, LogVariant};
use crate::problem::{InitialCondition, PhysicalSetup};
use crate::quadrature::{solve_quadrature, solve_quadrature_log};
use crate::series::{
    u_bessel_j0_squared_with, u_bessel_j0_with, u_product_ik_with, Constants, SeriesParams,
};
use crate::specfun::bessel_i0_scaled;

/// Oracle tolerance used for every row.
pub const ORACLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationRow {
    pub kappa: f64,
    pub t: f64,
    pub r: f64,
    pub oracle: f64,
    pub adopted: f64,
    pub alternative: f64,
}

impl CalibrationRow {
    pub fn adopted_deviation(&self) -> f64 {
        (self.adopted - self.oracle).abs()
    }

    pub fn alternative_deviation(&self) -> f64 {
        (self.alternative - self.oracle).abs()
    }

    /// `alternative / oracle`; NaN when the oracle vanishes.
    pub fn alternative_ratio(&self) -> f64 {
        if self.oracle == 0.0 {
            f64::NAN
        } else {
            self.alternative / self.oracle
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub id: &'static str,
    pub summary: &'static str,
    pub rows: Vec<CalibrationRow>,
}

impl Discrepancy {
    pub fn worst_adopted(&self) -> f64 {
        self.rows
            .iter()
            .map(CalibrationRow::adopted_deviation)
            .fold(0.0, f64::max)
    }

    pub fn worst_alternative(&self) -> f64 {
        self.rows
            .iter()
            .map(CalibrationRow::alternative_deviation)
            .fold(0.0, f64::max)
    }
}

const PROTOCOL_RADII: [f64; 3] = [0.0, 0.5, 1.0];

fn series_rows(
    g: &InitialCondition,
    v: f64,
    radii: &[f64],
    eval: impl Fn(&SeriesParams, &Constants) -> Result<f64>,
    alternative: Constants,
) -> Result<Vec<CalibrationRow>> {
    let (kappa, t) = (1.0, 0.25);
    radii
        .iter()
        .map(|&r| {
            let setup = PhysicalSetup::new(kappa, r, t)?;
            let p = SeriesParams::new(1.0, setup).with_v(v).with_tol(1e-14);
            Ok(CalibrationRow {
                kappa,
                t,
                r,
                oracle: solve_quadrature(g, &setup, ORACLE_TOL)?.value,
                adopted: eval(&p, &Constants::DERIVED)?,
                alternative: eval(&p, &alternative)?,
            })
        })
        .collect()
}

/// `J0(r)^2`: overall factor 1/2.
pub fn j0_squared_half() -> Result<Discrepancy> {
    let alt = Constants {
        j0_squared_factor: 0.5,
        ..Constants::DERIVED
    };
    Ok(Discrepancy {
        id: "j0sq-half",
        summary: "J0^2 series with an extra factor 1/2",
        rows: series_rows(
            &InitialCondition::bessel_j0_squared(1.0)?,
            0.0,
            &PROTOCOL_RADII,
            |p, c| Ok(u_bessel_j0_squared_with(p, c)?.value),
            alt,
        )?,
    })
}

/// `J0(r)^2`: Kummer argument `r^2 / 16 kappa t` instead of `r^2 / 4 kappa t`.
pub fn j0_squared_argument() -> Result<Discrepancy> {
    let alt = Constants {
        j0_squared_divisor: 16.0,
        ..Constants::DERIVED
    };
    Ok(Discrepancy {
        id: "j0sq-argument",
        summary: "J0^2 series with argument r^2/(16 kappa t)",
        rows: series_rows(
            &InitialCondition::bessel_j0_squared(1.0)?,
            0.0,
            &PROTOCOL_RADII,
            |p, c| Ok(u_bessel_j0_squared_with(p, c)?.value),
            alt,
        )?,
    })
}

/// `J0(r)`: overall factor 1/2.
pub fn j0_half() -> Result<Discrepancy> {
    let alt = Constants {
        j0_factor: 0.5,
        ..Constants::DERIVED
    };
    Ok(Discrepancy {
        id: "j0-half",
        summary: "J0 series with an extra factor 1/2",
        rows: series_rows(
            &InitialCondition::bessel_j0(1.0)?,
            0.0,
            &PROTOCOL_RADII,
            |p, c| Ok(u_bessel_j0_with(p, c)?.value),
            alt,
        )?,
    })
}

/// `I_v(r) K_v(r)`, v = 0.3: overall factor 1 instead of 2.
pub fn product_ik_factor() -> Result<Discrepancy> {
    let alt = Constants {
        ik_factor: 1.0,
        ..Constants::DERIVED
    };
    Ok(Discrepancy {
        id: "ivkv-factor",
        summary: "I_v K_v series with overall factor 1",
        rows: series_rows(
            &InitialCondition::product_ik(1.0, 0.3)?,
            0.3,
            &PROTOCOL_RADII,
            |p, c| Ok(u_product_ik_with(p, c)?.value),
            alt,
        )?,
    })
}

/// Axis value for `J0(r)^2`: `e^{-2w} I0(2w)` against `e^{-w} I0(w)`.
pub fn j0_squared_axis_limit() -> Result<Discrepancy> {
    let g = InitialCondition::bessel_j0_squared(1.0)?;
    let rows = [0.1, 0.25, 1.0]
        .iter()
        .map(|&kt| {
            let setup = PhysicalSetup::new(1.0, 0.0, kt)?;
            Ok(CalibrationRow {
                kappa: 1.0,
                t: kt,
                r: 0.0,
                oracle: solve_quadrature(&g, &setup, ORACLE_TOL)?.value,
                adopted: bessel_i0_scaled(2.0 * kt)?,
                alternative: bessel_i0_scaled(kt)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Discrepancy {
        id: "j0sq-axis",
        summary: "J0^2 axis value e^{-w} I0(w) in place of e^{-2w} I0(2w)",
        rows,
    })
}

/// `h(r) ln r` with Gaussian h: first term without I0 and psi series from n = 1.
pub fn log_first_term() -> Result<Discrepancy> {
    let h = InitialCondition::gaussian(1.0)?;
    let rows = [0.25, 0.7, 1.5]
        .iter()
        .map(|&r| {
            let setup = PhysicalSetup::new(1.0, r, 0.25)?;
            Ok(CalibrationRow {
                kappa: 1.0,
                t: 0.25,
                r,
                oracle: solve_quadrature_log(&h, &setup, ORACLE_TOL)?.value,
                adopted: u_log_weighted_with(&h, &setup, 1e-12, LogVariant::DERIVED)?.total,
                alternative: u_log_weighted_with(&h, &setup, 1e-12, LogVariant::PRINTED)?.total,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Discrepancy {
        id: "log-first-term",
        summary: "log profile: first term without I0, psi series from n = 1",
        rows,
    })
}

/// Every comparison, in a fixed order.
pub fn all() -> Result<Vec<Discrepancy>> {
    Ok(vec![
        j0_squared_half()?,
        j0_squared_argument()?,
        j0_half()?,
        product_ik_factor()?,
        j0_squared_axis_limit()?,
        log_first_term()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adopted_constants_match_and_halves_are_off_by_two() {
        for d in [
            j0_squared_half().unwrap(),
            j0_half().unwrap(),
            product_ik_factor().unwrap(),
        ] {
            assert!(
                d.worst_adopted() < 1e-10,
                "{}: {:e}",
                d.id,
                d.worst_adopted()
            );
            for row in &d.rows {
                let ratio = row.alternative_ratio();
                assert!((ratio - 0.5).abs() < 1e-8, "{} {row:?}", d.id);
            }
        }
    }

    #[test]
    fn argument_mismatch_is_visible_off_axis() {
        let d = j0_squared_argument().unwrap();
        let at_one = d.rows.iter().find(|row| row.r == 1.0).unwrap();
        assert!(at_one.alternative_deviation() >= 1e-2);
        assert!(d.rows[0].alternative_deviation() < 1e-12);
    }

    #[test]
    fn axis_limit() {
        let d = j0_squared_axis_limit().unwrap();
        assert!(d.worst_adopted() < 1e-12);
        assert!(d.rows[2].alternative_deviation() >= 1e-2);
    }
}
