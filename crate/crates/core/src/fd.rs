//! Crank-Nicolson finite differences for `u_t = kappa (u_rr + u_r / r)`.
//!
//! Uniform mesh `r_i = i dr`, `i = 0..=nr`. At the axis the operator is its
//! regular limit `2 kappa u_rr` with the mirror ghost `u_{-1} = u_1`. The
//! first two steps are replaced by four backward-Euler half steps so that the
//! non-smooth modes of a disk profile are damped before Crank-Nicolson takes
//! over.

use crate::error::{Error, Result};
use crate::problem::InitialCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterBoundary {
    DirichletZero,
    NeumannZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDConfig {
    pub r_max: f64,
    pub nr: usize,
    pub t_end: f64,
    pub nt: usize,
    pub outer_bc: OuterBoundary,
}

impl FDConfig {
    pub fn new(r_max: f64, nr: usize, t_end: f64, nt: usize) -> Self {
        FDConfig {
            r_max,
            nr,
            t_end,
            nt,
            outer_bc: OuterBoundary::DirichletZero,
        }
    }

    pub fn with_boundary(self, outer_bc: OuterBoundary) -> Self {
        FDConfig { outer_bc, ..self }
    }

    /// Both mesh sizes doubled.
    pub fn refined(self) -> Self {
        FDConfig {
            nr: 2 * self.nr,
            nt: 2 * self.nt,
            ..self
        }
    }

    pub fn dr(&self) -> f64 {
        self.r_max / self.nr as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.nt as f64
    }

    /// Smallest admissible outer radius: 8 sqrt(kappa t_end) beyond the
    /// extent of g.
    pub fn min_r_max(g: &InitialCondition, kappa: f64, t_end: f64) -> f64 {
        8.0 * (kappa * t_end).sqrt() + g.effective_extent().unwrap_or(0.0)
    }

    pub fn validate(&self, g: &InitialCondition, kappa: f64) -> Result<()> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must be > 0"
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end = {} must be > 0",
                self.t_end
            )));
        }
        if self.nr < 64 || self.nt < 32 {
            return Err(Error::InvalidParameter(format!(
                "mesh {} x {} is below the 64 x 32 minimum",
                self.nr, self.nt
            )));
        }
        let need = Self::min_r_max(g, kappa, self.t_end);
        if !(self.r_max >= need && self.r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "r_max = {} is below 8 sqrt(kappa t) + extent = {need}",
                self.r_max
            )));
        }
        Ok(())
    }
}

/// Solution values on the mesh at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub t: f64,
}

impl RadialProfile {
    /// Weights under which the scheme conserves `sum w_i u_i` exactly with a
    /// zero-flux outer boundary: `dr^2 / 8` on the axis, `r_i dr` inside and
    /// `(r_N - dr/2) dr / 2` on the rim.
    pub fn mass_weights(&self) -> Vec<f64> {
        let n = self.radii.len() - 1;
        let dr = self.radii[1] - self.radii[0];
        (0..=n)
            .map(|i| match i {
                0 => dr * dr / 8.0,
                _ if i == n => (self.radii[n] - 0.5 * dr) * dr / 2.0,
                _ => self.radii[i] * dr,
            })
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.mass_weights()
            .iter()
            .zip(&self.values)
            .map(|(w, u)| w * u)
            .sum()
    }

    /// Linear interpolation; `None` outside the mesh.
    pub fn interpolate(&self, r: f64) -> Option<f64> {
        let n = self.radii.len() - 1;
        let dr = self.radii[1] - self.radii[0];
        if !(r >= 0.0 && r <= self.radii[n]) {
            return None;
        }
        let i = ((r / dr).floor() as usize).min(n - 1);
        let f = (r - self.radii[i]) / dr;
        Some(self.values[i] * (1.0 - f) + self.values[i + 1] * f)
    }
}

/// Initial mesh values; a disk is cell-averaged over the annulus of each
/// node so that its edge does not fall mid-cell.
pub fn initial_values(g: &InitialCondition, radii: &[f64]) -> Vec<f64> {
    let dr = radii[1] - radii[0];
    match g {
        InitialCondition::UniformDisk { radius } => radii
            .iter()
            .map(|&r| {
                let lo = (r - 0.5 * dr).max(0.0);
                let hi = r + 0.5 * dr;
                let inside = radius.clamp(lo, hi);
                (inside * inside - lo * lo) / (hi * hi - lo * lo)
            })
            .collect(),
        _ => radii.iter().map(|&r| g.eval(r)).collect(),
    }
}

struct Tridiagonal {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiagonal {
    // Thomas algorithm; the matrices here are diagonally dominant.
    fn solve(&self, rhs: &mut [f64], scratch: &mut [f64]) {
        let n = rhs.len();
        scratch[0] = self.upper[0] / self.diag[0];
        rhs[0] /= self.diag[0];
        for i in 1..n {
            let m = self.diag[i] - self.lower[i] * scratch[i - 1];
            scratch[i] = if i + 1 < n { self.upper[i] / m } else { 0.0 };
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= scratch[i] * rhs[i + 1];
        }
    }
}

/// The spatial operator as three bands: `(L u)_i = a_i u_{i-1} + b_i u_i + c_i u_{i+1}`.
fn operator(cfg: &FDConfig, kappa: f64) -> Tridiagonal {
    let n = cfg.nr;
    let dr = cfg.dr();
    let k = kappa / (dr * dr);
    let mut lower = vec![0.0; n + 1];
    let mut diag = vec![0.0; n + 1];
    let mut upper = vec![0.0; n + 1];
    diag[0] = -4.0 * k;
    upper[0] = 4.0 * k;
    for i in 1..n {
        let half = 0.5 / i as f64;
        lower[i] = k * (1.0 - half);
        diag[i] = -2.0 * k;
        upper[i] = k * (1.0 + half);
    }
    match cfg.outer_bc {
        OuterBoundary::DirichletZero => {}
        OuterBoundary::NeumannZero => {
            lower[n] = 2.0 * k;
            diag[n] = -2.0 * k;
        }
    }
    Tridiagonal { lower, diag, upper }
}

/// Runs the scheme to `cfg.t_end`, calling `monitor(step, t, values)` after
/// every step.
pub fn solve_fd_monitored(
    g: &InitialCondition,
    kappa: f64,
    cfg: &FDConfig,
    mut monitor: impl FnMut(usize, f64, &[f64]),
) -> Result<RadialProfile> {
    cfg.validate(g, kappa)?;
    let n = cfg.nr;
    let dr = cfg.dr();
    let radii: Vec<f64> = (0..=n).map(|i| i as f64 * dr).collect();
    let mut u = initial_values(g, &radii);
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(
            "solve_fd",
            "initial profile is not finite on the mesh",
        ));
    }
    let dirichlet = cfg.outer_bc == OuterBoundary::DirichletZero;
    if dirichlet {
        u[n] = 0.0;
    }
    let limit = 10.0
        * u.iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
    let op = operator(cfg, kappa);
    let implicit = |theta_dt: f64| {
        let mut m = Tridiagonal {
            lower: op.lower.iter().map(|a| -theta_dt * a).collect(),
            diag: op.diag.iter().map(|b| 1.0 - theta_dt * b).collect(),
            upper: op.upper.iter().map(|c| -theta_dt * c).collect(),
        };
        if dirichlet {
            m.lower[n] = 0.0;
            m.diag[n] = 1.0;
        }
        m
    };
    let dt = cfg.dt();
    // a backward-Euler half step and a Crank-Nicolson step share this matrix
    let lhs = implicit(0.5 * dt);
    let mut rhs = vec![0.0; n + 1];
    let mut scratch = vec![0.0; n + 1];
    let mut t = 0.0;
    for step in 1..=cfg.nt {
        if step <= 2 {
            // two backward-Euler half steps
            for _ in 0..2 {
                rhs.copy_from_slice(&u);
                lhs.solve(&mut rhs, &mut scratch);
                u.copy_from_slice(&rhs);
            }
        } else {
            let h = 0.5 * dt;
            rhs[0] = u[0] + h * (op.diag[0] * u[0] + op.upper[0] * u[1]);
            for i in 1..n {
                rhs[i] = u[i]
                    + h * (op.lower[i] * u[i - 1] + op.diag[i] * u[i] + op.upper[i] * u[i + 1]);
            }
            rhs[n] = if dirichlet {
                0.0
            } else {
                u[n] + h * (op.lower[n] * u[n - 1] + op.diag[n] * u[n])
            };
            lhs.solve(&mut rhs, &mut scratch);
            u.copy_from_slice(&rhs);
        }
        t = step as f64 * dt;
        if u.iter().any(|v| !(v.abs() <= limit)) {
            return Err(Error::Instability { step });
        }
        monitor(step, t, &u);
    }
    Ok(RadialProfile {
        radii,
        values: u,
        t,
    })
}

/// Crank-Nicolson solution at `cfg.t_end`.
pub fn solve_fd(g: &InitialCondition, kappa: f64, cfg: &FDConfig) -> Result<RadialProfile> {
    solve_fd_monitored(g, kappa, cfg, |_, _, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_exact(r: f64, t: f64) -> f64 {
        let d = 1.0 + 4.0 * t;
        (-r * r / d).exp() / d
    }

    #[test]
    fn constants_are_fixed_points() {
        let g = InitialCondition::constant(1.0);
        let cfg = FDConfig::new(10.0, 200, 0.5, 50).with_boundary(OuterBoundary::NeumannZero);
        let p = solve_fd(&g, 1.0, &cfg).unwrap();
        let dev = p.values.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-12, "{dev:e}");
    }

    #[test]
    fn gaussian_error_and_order() {
        let g = InitialCondition::gaussian(1.0).unwrap();
        let err = |cfg: FDConfig| {
            let p = solve_fd(&g, 1.0, &cfg).unwrap();
            p.radii
                .iter()
                .zip(&p.values)
                .map(|(&r, &u)| (u - gaussian_exact(r, 0.5)).abs())
                .fold(0.0, f64::max)
        };
        let cfg = FDConfig::new(12.0, 300, 0.5, 100);
        let (e1, e2) = (err(cfg), err(cfg.refined()));
        assert!(e1 / e2 >= 3.5, "{e1:e} {e2:e}");
    }

    #[test]
    fn disk_mass_is_conserved() {
        let g = InitialCondition::uniform_disk(1.0).unwrap();
        let cfg = FDConfig::new(12.0, 480, 0.5, 100).with_boundary(OuterBoundary::NeumannZero);
        let radii: Vec<f64> = (0..=cfg.nr).map(|i| i as f64 * cfg.dr()).collect();
        let start = RadialProfile {
            values: initial_values(&g, &radii),
            radii,
            t: 0.0,
        };
        let mut worst = 0.0f64;
        let mut bounds = (f64::INFINITY, f64::NEG_INFINITY);
        let p = solve_fd_monitored(&g, 1.0, &cfg, |_, _, u| {
            let snap = RadialProfile {
                radii: start.radii.clone(),
                values: u.to_vec(),
                t: 0.0,
            };
            worst = worst.max((snap.mass() - start.mass()).abs() / start.mass());
            for &v in u {
                bounds = (bounds.0.min(v), bounds.1.max(v));
            }
        })
        .unwrap();
        assert!(worst < 1e-12, "{worst:e}");
        assert!(bounds.0 >= -1e-12 && bounds.1 <= 1.0 + 1e-12, "{bounds:?}");
        assert!((p.mass() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn mesh_rules() {
        let g = InitialCondition::gaussian(1.0).unwrap();
        assert!(solve_fd(&g, 1.0, &FDConfig::new(5.0, 400, 0.5, 100)).is_err());
        assert!(solve_fd(&g, 1.0, &FDConfig::new(12.0, 32, 0.5, 100)).is_err());
    }
}
