use axidiff_core::fd::{solve_fd, FDConfig};
use axidiff_core::log_kernel::u_log_weighted;
use axidiff_core::mellin::{u_contour_auto, MellinDescriptor};
use axidiff_core::quadrature::solve_quadrature;
use axidiff_core::series::{evaluate, SeriesKind, SeriesParams};
use axidiff_core::{Error, InitialCondition, PhysicalSetup, Result};

use crate::args::{FdArgs, IcKind, Method, ProblemArgs};

/// A validated profile.
#[derive(Debug, Clone)]
pub struct Problem {
    pub kind: IcKind,
    /// The full profile; `h ln r` for the log kinds.
    pub g: InitialCondition,
    /// The base `h` of a log profile.
    pub base: Option<InitialCondition>,
    pub a: f64,
    pub v: f64,
    pub kappa: f64,
}

impl Problem {
    pub fn from_args(p: &ProblemArgs) -> Result<Self> {
        let v = match (p.ic, p.v) {
            (IcKind::Ivkv, None) => {
                return Err(Error::InvalidParameter("--ic ivkv needs --v".into()));
            }
            (_, v) => v.unwrap_or(0.0),
        };
        let base = match p.ic {
            IcKind::LogGaussian => Some(InitialCondition::gaussian(p.c)?),
            IcKind::LogDisk => Some(InitialCondition::uniform_disk(p.radius)?),
            _ => None,
        };
        let g = match p.ic {
            IcKind::Gaussian => InitialCondition::gaussian(p.c)?,
            IcKind::Disk => InitialCondition::uniform_disk(p.radius)?,
            IcKind::J0 => InitialCondition::bessel_j0(p.a)?,
            IcKind::J0sq => InitialCondition::bessel_j0_squared(p.a)?,
            IcKind::Ivkv => InitialCondition::product_ik(p.a, v)?,
            IcKind::LogGaussian | IcKind::LogDisk => {
                InitialCondition::log_weighted(base.clone().expect("log kinds have a base"))?
            }
        };
        if !(p.kappa > 0.0 && p.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {} must be > 0",
                p.kappa
            )));
        }
        Ok(Problem {
            kind: p.ic,
            g,
            base,
            a: p.a,
            v,
            kappa: p.kappa,
        })
    }

    pub fn series_kind(&self) -> Option<SeriesKind> {
        match self.kind {
            IcKind::J0 => Some(SeriesKind::BesselJ0),
            IcKind::J0sq => Some(SeriesKind::BesselJ0Squared),
            IcKind::Ivkv => Some(SeriesKind::ProductIK),
            _ => None,
        }
    }

    /// Rejects method/profile pairs that have no implementation.
    pub fn check_method(&self, method: Method) -> Result<()> {
        let ok = match method {
            Method::Series => self.series_kind().is_some(),
            Method::Quadrature => true,
            Method::Contour => self.base.is_none(),
            Method::Fd => matches!(self.kind, IcKind::Gaussian | IcKind::Disk),
            Method::Log => self.base.is_some(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "method {} does not apply to --ic {:?}",
                method.name(),
                self.kind
            )))
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub err_est: f64,
    /// Terms, integrand evaluations, contour nodes or mesh cells.
    pub work: u64,
}

pub fn evaluate_point(
    problem: &Problem,
    method: Method,
    r: f64,
    t: f64,
    tol: f64,
    fd: FdArgs,
) -> Result<Evaluation> {
    problem.check_method(method)?;
    let setup = PhysicalSetup::new(problem.kappa, r, t)?;
    match method {
        Method::Series => {
            let kind = problem.series_kind().expect("checked above");
            let p = SeriesParams::new(problem.a, setup)
                .with_v(problem.v)
                .with_tol(tol);
            let res = evaluate(kind, &p)?;
            if !res.converged() {
                return Err(Error::NonConvergence {
                    what: "residue series",
                    budget: res.terms_used,
                });
            }
            Ok(Evaluation {
                value: res.value,
                err_est: res.tail_estimate,
                work: res.terms_used as u64,
            })
        }
        Method::Quadrature => {
            let q = solve_quadrature(&problem.g, &setup, tol)?;
            Ok(Evaluation {
                value: q.value,
                err_est: q.abs_error_estimate,
                work: q.evaluations as u64,
            })
        }
        Method::Contour => {
            let md = MellinDescriptor::for_initial_condition(&problem.g)?;
            let c = u_contour_auto(&md, &setup, tol)?;
            Ok(Evaluation {
                value: c.value,
                err_est: c.config.tol.max(c.imag.abs()),
                work: c.config.n_points as u64,
            })
        }
        Method::Fd => fd_point(problem, r, t, fd),
        Method::Log => {
            let h = problem.base.as_ref().expect("checked above");
            let d = u_log_weighted(h, &setup, tol)?;
            Ok(Evaluation {
                value: d.total,
                err_est: d.psi_series.tail_estimate,
                work: d.psi_series.terms_used as u64,
            })
        }
    }
}

/// Mesh solution at `t`, linearly interpolated to `r`. The error estimate
/// is the Richardson difference against the half-resolution mesh.
fn fd_point(problem: &Problem, r: f64, t: f64, fd: FdArgs) -> Result<Evaluation> {
    let reach = 8.0 * (problem.kappa * t).sqrt();
    let r_max = FDConfig::min_r_max(&problem.g, problem.kappa, t).max(r + reach);
    let cfg = FDConfig::new(r_max, fd.nr, t, fd.nt);
    let at = |cfg: &FDConfig| -> Result<f64> {
        solve_fd(&problem.g, problem.kappa, cfg)?
            .interpolate(r)
            .ok_or_else(|| Error::InvalidParameter(format!("r = {r} is outside the mesh")))
    };
    let value = at(&cfg)?;
    let coarse = FDConfig::new(r_max, fd.nr / 2, t, fd.nt / 2);
    let err_est = match coarse.validate(&problem.g, problem.kappa) {
        Ok(()) => (value - at(&coarse)?).abs() / 3.0,
        Err(_) => f64::NAN,
    };
    Ok(Evaluation {
        value,
        err_est,
        work: (fd.nr * fd.nt) as u64,
    })
}
