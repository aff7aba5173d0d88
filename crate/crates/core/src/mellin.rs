//! Mellin-Barnes contour representation of the solution.
//!
//! Pairing the Mellin transform of `y I0(2 y r / T) e^{-y^2 / T}` with that of
//! the initial data gives, for `T = 4 kappa t`, `x = r^2 / T`,
//!
//! ```text
//! u = e^{-x} / sqrt(T) (1 / 2 pi i) int_{(c)} Gamma((s+1)/2) T^{s/2} 1F1((s+1)/2; 1; x) M[g](1-s) ds
//! ```
//!
//! which is evaluated with the trapezoid rule on `s = c + i tau`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{InitialCondition, PhysicalSetup};
use crate::specfun::{hyp1f1, log_gamma_complex, whittaker_m, Accuracy, ComplexCompensatedSum};

/// Default abscissa; inside every catalogued strip.
pub const DEFAULT_ABSCISSA: f64 = 0.5;

/// Default number of trapezoid nodes.
pub const DEFAULT_NODES: usize = 2048;

/// Largest `x = r^2 / 4 kappa t` for which the Kummer factor is summed
/// directly (it grows like e^x).
const MAX_X: f64 = 600.0;

const MAX_NODES: usize = 400_000;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_strip(s: Complex64, lo: f64, hi: f64) -> Result<()> {
    if s.re > lo && s.re < hi && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfStrip {
            re: s.re,
            im: s.im,
            lo,
            hi,
        })
    }
}

fn lg(z: Complex64) -> Result<Complex64> {
    log_gamma_complex(z)
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {value} must be > 0"
        )))
    }
}

fn j0_continued(s: Complex64, a: f64) -> Result<Complex64> {
    let ln = (s - 1.0) * 2f64.ln() + lg(s / 2.0)? - lg(1.0 - s / 2.0)? - s * a.ln();
    Ok(ln.exp())
}

fn j0_squared_continued(s: Complex64, a: f64) -> Result<Complex64> {
    let ln =
        (s - 1.0) * 2f64.ln() + lg(s / 2.0)? + lg(1.0 - s)? - 3.0 * lg(1.0 - s / 2.0)? - s * a.ln();
    Ok(ln.exp())
}

fn iv_kv_continued(s: Complex64, a: f64, v: f64) -> Result<Complex64> {
    let ln =
        lg(s / 2.0 + v)? + lg(0.5 - s / 2.0)? + lg(s / 2.0)? - lg(v + 1.0 - s / 2.0)? - s * a.ln();
    Ok(ln.exp() / (4.0 * PI.sqrt()))
}

fn gaussian_continued(s: Complex64, cc: f64) -> Result<Complex64> {
    Ok((lg(s / 2.0)? - s / 2.0 * cc.ln()).exp() / 2.0)
}

fn disk_continued(s: Complex64, radius: f64) -> Result<Complex64> {
    if s.norm() == 0.0 {
        return Err(Error::GammaPole(0.0));
    }
    Ok((s * radius.ln()).exp() / s)
}

/// Mellin transform of J0(a y): `2^{s-1} Gamma(s/2) / Gamma(1 - s/2) a^{-s}`, 0 < Re s < 3/2.
pub fn mellin_j0(s: Complex64, a: f64) -> Result<Complex64> {
    positive("a", a)?;
    check_strip(s, 0.0, 1.5)?;
    j0_continued(s, a)
}

/// Mellin transform of J0(a y)^2:
/// `2^{s-1} Gamma(s/2) Gamma(1-s) / Gamma(1 - s/2)^3 a^{-s}`, 0 < Re s < 1.
pub fn mellin_j0_squared(s: Complex64, a: f64) -> Result<Complex64> {
    positive("a", a)?;
    check_strip(s, 0.0, 1.0)?;
    j0_squared_continued(s, a)
}

/// Mellin transform of I_v(a y) K_v(a y):
/// `Gamma(s/2 + v) Gamma(1/2 - s/2) Gamma(s/2) / (4 sqrt(pi) Gamma(v + 1 - s/2)) a^{-s}`, 0 < Re s < 1.
pub fn mellin_iv_kv(s: Complex64, a: f64, v: f64) -> Result<Complex64> {
    positive("a", a)?;
    check_strip(s, 0.0, 1.0)?;
    iv_kv_continued(s, a, v)
}

/// Mellin transform of e^{-c y^2}: `Gamma(s/2) c^{-s/2} / 2`, Re s > 0.
pub fn mellin_gaussian(s: Complex64, cc: f64) -> Result<Complex64> {
    positive("c", cc)?;
    check_strip(s, 0.0, f64::INFINITY)?;
    gaussian_continued(s, cc)
}

/// Mellin transform of the indicator of [0, R): `R^s / s`, Re s > 0.
pub fn mellin_disk(s: Complex64, radius: f64) -> Result<Complex64> {
    positive("radius", radius)?;
    check_strip(s, 0.0, f64::INFINITY)?;
    disk_continued(s, radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayHint {
    Polynomial,
    Exponential,
}

type Transform = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// A Mellin transform `M[g](s)` with its strip of analyticity, exposed to the
/// contour as `M[g](1 - s)`.
#[derive(Clone)]
pub struct MellinDescriptor {
    pub label: String,
    /// Strip of `M[g](s)`.
    pub transform_lo: f64,
    pub transform_hi: f64,
    pub decay_hint: DecayHint,
    /// Smallest distance between distinct poles of the continued transform,
    /// when the family can collide.
    pub pole_separation: Option<f64>,
    continued: Transform,
}

impl fmt::Debug for MellinDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MellinDescriptor")
            .field("label", &self.label)
            .field("strip", &(self.strip_lo(), self.strip_hi()))
            .field("decay_hint", &self.decay_hint)
            .finish_non_exhaustive()
    }
}

impl MellinDescriptor {
    pub fn new(
        label: impl Into<String>,
        transform_strip: (f64, f64),
        decay_hint: DecayHint,
        continued: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let (lo, hi) = transform_strip;
        if !(lo < hi) {
            return Err(Error::InvalidParameter(format!("empty strip ({lo}, {hi})")));
        }
        Ok(MellinDescriptor {
            label: label.into(),
            transform_lo: lo,
            transform_hi: hi,
            decay_hint,
            pole_separation: None,
            continued: Arc::new(continued),
        })
    }

    pub fn j0(a: f64) -> Result<Self> {
        positive("a", a)?;
        Self::new(
            format!("j0(a={a})"),
            (0.0, 1.5),
            DecayHint::Polynomial,
            move |s| j0_continued(s, a),
        )
    }

    pub fn j0_squared(a: f64) -> Result<Self> {
        positive("a", a)?;
        Self::new(
            format!("j0sq(a={a})"),
            (0.0, 1.0),
            DecayHint::Polynomial,
            move |s| j0_squared_continued(s, a),
        )
    }

    /// Integer `v` is accepted here so that the double-pole lattice can be
    /// inspected; the contour itself needs only the strip.
    pub fn iv_kv(a: f64, v: f64) -> Result<Self> {
        positive("a", a)?;
        if !(0.0..1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "order v = {v} must lie in [0, 1)"
            )));
        }
        let mut md = Self::new(
            format!("ivkv(a={a},v={v})"),
            (0.0, 1.0),
            DecayHint::Exponential,
            move |s| iv_kv_continued(s, a, v),
        )?;
        md.pole_separation = Some(2.0 * (v - v.round()).abs());
        Ok(md)
    }

    pub fn gaussian(cc: f64) -> Result<Self> {
        positive("c", cc)?;
        Self::new(
            format!("gaussian(c={cc})"),
            (0.0, f64::INFINITY),
            DecayHint::Exponential,
            move |s| gaussian_continued(s, cc),
        )
    }

    pub fn disk(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Self::new(
            format!("disk(radius={radius})"),
            (0.0, f64::INFINITY),
            DecayHint::Polynomial,
            move |s| disk_continued(s, radius),
        )
    }

    /// The catalogued descriptor for a builtin profile.
    pub fn for_initial_condition(g: &InitialCondition) -> Result<Self> {
        match *g {
            InitialCondition::Gaussian { c } => Self::gaussian(c),
            InitialCondition::UniformDisk { radius } => Self::disk(radius),
            InitialCondition::BesselJ0 { a } => Self::j0(a),
            InitialCondition::BesselJ0Squared { a } => Self::j0_squared(a),
            InitialCondition::ProductIK { a, v } => {
                g.validate()?;
                Self::iv_kv(a, v)
            }
            _ => Err(Error::InvalidParameter(format!(
                "no Mellin transform is catalogued for {}",
                g.label()
            ))),
        }
    }

    /// Lower edge of the strip of `M[g](1 - s)` in the contour variable.
    pub fn strip_lo(&self) -> f64 {
        1.0 - self.transform_hi
    }

    pub fn strip_hi(&self) -> f64 {
        1.0 - self.transform_lo
    }

    /// Abscissae allowed for the contour: inside the strip and right of -1.
    pub fn admissible(&self) -> (f64, f64) {
        (self.strip_lo().max(-1.0), self.strip_hi())
    }

    /// `M[g](s)` continued analytically beyond the strip.
    pub fn transform(&self, s: Complex64) -> Result<Complex64> {
        (self.continued)(s)
    }

    /// `M[g](1 - s)` for `s` inside the strip.
    pub fn evaluate(&self, s: Complex64) -> Result<Complex64> {
        check_strip(s, self.strip_lo(), self.strip_hi())?;
        (self.continued)(1.0 - s)
    }
}

/// Trapezoid discretisation of the vertical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    pub c: f64,
    pub tau_max: f64,
    pub n_points: usize,
    pub tol: f64,
}

impl ContourConfig {
    /// Chooses `tau_max` from the Gamma decay `e^{-pi |tau| / 4}` and then
    /// extends it until the integrand is below `tol / 10` at both ends; the
    /// node spacing resolves the distance from `c` to the nearest
    /// singularity.
    pub fn auto(md: &MellinDescriptor, setup: &PhysicalSetup, tol: f64) -> Result<Self> {
        let (lo, hi) = md.admissible();
        let c = if DEFAULT_ABSCISSA > lo && DEFAULT_ABSCISSA < hi {
            DEFAULT_ABSCISSA
        } else {
            let hi = hi.min(lo + 2.0);
            0.5 * (lo + hi)
        };
        Self::auto_at(md, setup, tol, c)
    }

    pub fn auto_at(md: &MellinDescriptor, setup: &PhysicalSetup, tol: f64, c: f64) -> Result<Self> {
        check_contour_tol(tol)?;
        let (lo, hi) = md.admissible();
        if !(c > lo && c < hi) {
            return Err(Error::OutOfStrip {
                re: c,
                im: 0.0,
                lo,
                hi,
            });
        }
        let k = integrand(md, setup, c, 0.0)?.norm().max(1e-300);
        let mut tau = (4.0 / PI) * (k.max(1.0) / tol).ln().max(1.0);
        let mut peak = k;
        loop {
            let m = integrand(md, setup, c, tau)?
                .norm()
                .max(integrand(md, setup, c, -tau)?.norm());
            peak = peak.max(m);
            if m <= 0.1 * tol {
                break;
            }
            tau *= 1.25;
            if tau > 5_000.0 {
                return Err(Error::Truncation { magnitude: m, tol });
            }
        }
        // singularity distance of the integrand in the tau direction
        let d = (c - lo.max(-1.0)).min(hi - c).min(1.0);
        let digits = (peak.max(1.0) / tol).ln() + 10f64.ln();
        let h = 2.0 * PI * 0.8 * d / digits;
        let n = ((2.0 * tau / h).ceil() as usize).max(DEFAULT_NODES);
        let n = n + n % 2;
        if n > MAX_NODES {
            return Err(Error::NonConvergence {
                what: "contour node count",
                budget: MAX_NODES,
            });
        }
        Ok(ContourConfig {
            c,
            tau_max: tau,
            n_points: n,
            tol,
        })
    }

    /// Node spacing 2 tau_max / n_points.
    pub fn spacing(&self) -> f64 {
        2.0 * self.tau_max / self.n_points as f64
    }

    /// Same node spacing over a different height.
    pub fn with_tau_max(&self, tau_max: f64) -> Self {
        let n = ((2.0 * tau_max / self.spacing()).round() as usize).max(64);
        ContourConfig {
            tau_max,
            n_points: n + n % 2,
            ..*self
        }
    }

    pub fn with_abscissa(&self, c: f64) -> Self {
        ContourConfig { c, ..*self }
    }

    pub fn validate(&self, md: &MellinDescriptor) -> Result<()> {
        check_contour_tol(self.tol)?;
        let (lo, hi) = md.admissible();
        if !(self.c > lo && self.c < hi) {
            return Err(Error::OutOfStrip {
                re: self.c,
                im: 0.0,
                lo,
                hi,
            });
        }
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau_max = {} must be > 0",
                self.tau_max
            )));
        }
        if self.n_points < 64 {
            return Err(Error::InvalidParameter(format!(
                "n_points = {} must be >= 64",
                self.n_points
            )));
        }
        Ok(())
    }
}

fn check_contour_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1e-2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tol = {tol} must lie in (0, 1e-2)"
        )))
    }
}

fn check_setup(setup: &PhysicalSetup) -> Result<()> {
    setup.validate()?;
    if setup.r <= 0.0 {
        return Err(Error::domain(
            "u_contour",
            "r = 0 is excluded; use the series or the oracle",
        ));
    }
    if setup.x() > MAX_X {
        return Err(Error::domain(
            "u_contour",
            format!("r^2 / 4 kappa t = {} exceeds {MAX_X}", setup.x()),
        ));
    }
    Ok(())
}

fn kummer_accuracy() -> Accuracy {
    Accuracy::tight()
}

/// Integrand in `tau`, including `e^{-x} / (2 pi sqrt(T))`, so that
/// `u = int integrand dtau`.
pub fn integrand(
    md: &MellinDescriptor,
    setup: &PhysicalSetup,
    c: f64,
    tau: f64,
) -> Result<Complex64> {
    let t4 = setup.four_kt();
    let x = setup.x();
    let s = cx(c, tau);
    let half = (s + 1.0) / 2.0;
    let ln = lg(half)? + s / 2.0 * t4.ln() - x - 0.5 * t4.ln();
    let f = hyp1f1(half, 1.0, x, kummer_accuracy())?;
    Ok(ln.exp() * f * md.evaluate(s)? / (2.0 * PI))
}

/// The same integrand assembled from the Whittaker function with the
/// `(1/r) e^{-x/2}` prefactor.
pub fn integrand_whittaker(
    md: &MellinDescriptor,
    setup: &PhysicalSetup,
    c: f64,
    tau: f64,
) -> Result<Complex64> {
    check_setup(setup)?;
    let t4 = setup.four_kt();
    let x = setup.x();
    let s = cx(c, tau);
    let ln = lg((s + 1.0) / 2.0)? + s / 2.0 * t4.ln() - x / 2.0;
    let m = whittaker_m(-s / 2.0, 0.0, x, kummer_accuracy())?;
    Ok(ln.exp() * m * md.evaluate(s)? / (2.0 * PI * setup.r))
}

/// Outcome of one contour integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourResult {
    pub value: f64,
    /// Imaginary part of the trapezoid sum; zero up to rounding by symmetry.
    pub imag: f64,
    /// Largest integrand magnitude at the two truncation points.
    pub endpoint_magnitude: f64,
    pub config: ContourConfig,
}

/// u(r, t) from the contour integral.
pub fn u_contour(
    md: &MellinDescriptor,
    setup: &PhysicalSetup,
    cfg: &ContourConfig,
) -> Result<ContourResult> {
    check_setup(setup)?;
    cfg.validate(md)?;
    let n = cfg.n_points;
    let h = cfg.spacing();
    let nodes: Vec<Result<Complex64>> = (0..=n)
        .into_par_iter()
        .map(|j| integrand(md, setup, cfg.c, -cfg.tau_max + j as f64 * h))
        .collect();
    let mut sum = ComplexCompensatedSum::new();
    for (j, f) in nodes.iter().enumerate() {
        let f = f.clone()?;
        let weight = if j == 0 || j == n { 0.5 } else { 1.0 };
        sum.add(f * weight);
    }
    let total = sum.value() * h;
    let first = nodes[0].clone()?.norm();
    let last = nodes[n].clone()?.norm();
    let endpoint_magnitude = first.max(last);
    if endpoint_magnitude > cfg.tol {
        return Err(Error::Truncation {
            magnitude: endpoint_magnitude,
            tol: cfg.tol,
        });
    }
    if total.im.abs() > 10.0 * cfg.tol {
        return Err(Error::SymmetryViolation {
            imag: total.im,
            tol: cfg.tol,
        });
    }
    Ok(ContourResult {
        value: total.re,
        imag: total.im,
        endpoint_magnitude,
        config: *cfg,
    })
}

/// [`u_contour`] with [`ContourConfig::auto`].
pub fn u_contour_auto(
    md: &MellinDescriptor,
    setup: &PhysicalSetup,
    tol: f64,
) -> Result<ContourResult> {
    check_setup(setup)?;
    let cfg = ContourConfig::auto(md, setup, tol)?;
    u_contour(md, setup, &cfg)
}

/// A pole of the contour integrand found by [`residue_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: f64,
    pub order: u32,
}

const SCAN_CELL: f64 = 0.25;
const SCAN_SAMPLES: usize = 512;

/// Locates the poles of `Gamma(1 - s/2) M[g](s)` on the real interval
/// `window`, which must lie left of the strip.
///
/// The window is tiled with circles of diameter 0.25; on each circle the
/// change in argument gives the number of poles inside and the moment
/// `(1/2 pi i) \oint s d log f` gives their location. If a pole sits on a
/// circle the tiling is shifted.
pub fn residue_scan(md: &MellinDescriptor, window: (f64, f64)) -> Result<Vec<Pole>> {
    let (lo, hi) = window;
    if !(lo < hi) || hi > md.transform_hi {
        return Err(Error::InvalidParameter(format!(
            "window ({lo}, {hi}) must be nonempty and left of {}",
            md.transform_hi
        )));
    }
    if let Some(sep) = md.pole_separation {
        if sep > 0.0 && sep < 2e-3 {
            return Err(Error::domain(
                "residue_scan",
                format!("pole lattices are {sep:e} apart; the scan cannot separate them"),
            ));
        }
    }
    let f = |s: Complex64| -> Option<Complex64> {
        let g = lg(1.0 - s / 2.0).ok()?.exp();
        let v = md.transform(s).ok()? * g;
        (v.norm().is_finite() && v.norm() > 0.0).then_some(v)
    };
    'shift: for offset in [0.0, 0.37, 0.61, 0.13] {
        let start = lo - offset * SCAN_CELL;
        let cells = ((hi - start) / SCAN_CELL).ceil() as usize;
        let mut poles = Vec::new();
        for k in 0..cells {
            let center = start + (k as f64 + 0.5) * SCAN_CELL;
            let radius = 0.5 * SCAN_CELL;
            let Some((winding, moment)) = circle_moments(&f, center, radius) else {
                continue 'shift;
            };
            if winding < 0 {
                let order = (-winding) as u32;
                let location = (moment / winding as f64).re;
                if location >= lo && location <= hi {
                    poles.push(Pole { location, order });
                }
            }
        }
        return Ok(poles);
    }
    Err(Error::domain(
        "residue_scan",
        "no pole-free tiling of the window was found",
    ))
}

// Winding number and (1 / 2 pi i) \oint s d log f on a circle, or None if the
// circle passes too close to a singularity.
fn circle_moments(
    f: &impl Fn(Complex64) -> Option<Complex64>,
    center: f64,
    radius: f64,
) -> Option<(i64, Complex64)> {
    let point = |j: usize| {
        let th = 2.0 * PI * j as f64 / SCAN_SAMPLES as f64;
        cx(center + radius * th.cos(), radius * th.sin())
    };
    let mut prev = f(point(0))?;
    let mut total_arg = 0.0;
    let mut moment = Complex64::new(0.0, 0.0);
    for j in 1..=SCAN_SAMPLES {
        let s = point(j % SCAN_SAMPLES);
        let val = f(s)?;
        let step = (val / prev).ln();
        if step.im.abs() > PI / 2.0 {
            return None;
        }
        total_arg += step.im;
        let h = 1e-6 * radius;
        let (fp, fm) = (f(s + h)?, f(s - h)?);
        let dlog = (fp / fm).ln() / (2.0 * h);
        let ds = (s - cx(center, 0.0)) * cx(0.0, 2.0 * PI / SCAN_SAMPLES as f64);
        moment += s * dlog * ds;
        prev = val;
    }
    let winding = (total_arg / (2.0 * PI)).round() as i64;
    Some((winding, moment / cx(0.0, 2.0 * PI)))
}
