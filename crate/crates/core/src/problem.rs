//! Problem description shared by every solution route.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::specfun::{bessel_ik_product, bessel_j0};

/// ln(1 / machine epsilon); Gaussian tails beyond this many e-folds vanish in f64.
pub const LN_INV_EPS: f64 = 36.043_653_389_117_15;

/// Diffusivity and evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSetup {
    pub kappa: f64,
    pub r: f64,
    pub t: f64,
}

impl PhysicalSetup {
    pub fn new(kappa: f64, r: f64, t: f64) -> Result<Self> {
        let setup = PhysicalSetup { kappa, r, t };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {} must be > 0",
                self.kappa
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t = {} must be > 0",
                self.t
            )));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "r = {} must be >= 0",
                self.r
            )));
        }
        let kt = self.kappa * self.t;
        if !(kt > 0.0 && kt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa * t = {kt} must be finite and > 0"
            )));
        }
        Ok(())
    }

    /// kappa * t, the only time scale that enters the solution.
    pub fn kt(&self) -> f64 {
        self.kappa * self.t
    }

    /// 4 kappa t.
    pub fn four_kt(&self) -> f64 {
        4.0 * self.kappa * self.t
    }

    /// r^2 / (4 kappa t).
    pub fn x(&self) -> f64 {
        self.r * self.r / self.four_kt()
    }

    pub fn with_r(&self, r: f64) -> Self {
        PhysicalSetup { r, ..*self }
    }

    pub fn with_t(&self, t: f64) -> Self {
        PhysicalSetup { t, ..*self }
    }
}

/// How far a user-supplied profile extends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportHint {
    /// g vanishes beyond this radius.
    Finite(f64),
    /// g is polynomially bounded, so the Gaussian factor controls the tail.
    GaussianDominated,
}

/// A user-supplied radial profile.
#[derive(Clone)]
pub struct CustomProfile {
    pub label: String,
    pub sampler: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub support: SupportHint,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("label", &self.label)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

/// Initial temperature profile g(r) = u(r, 0).
#[derive(Debug, Clone)]
pub enum InitialCondition {
    /// e^{-c r^2}
    Gaussian {
        c: f64,
    },
    /// 1 on [0, radius), 0 beyond.
    UniformDisk {
        radius: f64,
    },
    /// J0(a r)
    BesselJ0 {
        a: f64,
    },
    /// J0(a r)^2
    BesselJ0Squared {
        a: f64,
    },
    /// I_v(a r) K_v(a r), non-integer v in (0, 1).
    ProductIK {
        a: f64,
        v: f64,
    },
    /// h(r) ln r
    LogWeighted(Box<InitialCondition>),
    Custom(CustomProfile),
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

impl InitialCondition {
    pub fn gaussian(c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(InitialCondition::Gaussian { c })
    }

    pub fn uniform_disk(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(InitialCondition::UniformDisk { radius })
    }

    pub fn bessel_j0(a: f64) -> Result<Self> {
        positive("a", a)?;
        Ok(InitialCondition::BesselJ0 { a })
    }

    pub fn bessel_j0_squared(a: f64) -> Result<Self> {
        positive("a", a)?;
        Ok(InitialCondition::BesselJ0Squared { a })
    }

    pub fn product_ik(a: f64, v: f64) -> Result<Self> {
        let ic = InitialCondition::ProductIK { a, v };
        ic.validate()?;
        Ok(ic)
    }

    pub fn log_weighted(base: InitialCondition) -> Result<Self> {
        let ic = InitialCondition::LogWeighted(Box::new(base));
        ic.validate()?;
        Ok(ic)
    }

    pub fn custom(
        label: impl Into<String>,
        sampler: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: SupportHint,
    ) -> Self {
        InitialCondition::Custom(CustomProfile {
            label: label.into(),
            sampler: Arc::new(sampler),
            support,
        })
    }

    /// The profile g = 1 everywhere.
    pub fn constant(value: f64) -> Self {
        Self::custom(
            format!("constant {value}"),
            move |_| value,
            SupportHint::GaussianDominated,
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialCondition::Gaussian { c } => positive("c", *c),
            InitialCondition::UniformDisk { radius } => positive("radius", *radius),
            InitialCondition::BesselJ0 { a } | InitialCondition::BesselJ0Squared { a } => {
                positive("a", *a)
            }
            InitialCondition::ProductIK { a, v } => {
                positive("a", *a)?;
                if !(*v > 0.0 && *v < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "order v = {v} must lie in (0, 1)"
                    )));
                }
                if (v - v.round()).abs() <= 1e-6 {
                    return Err(Error::NearIntegerOrder(*v));
                }
                Ok(())
            }
            InitialCondition::LogWeighted(base) => {
                if matches!(**base, InitialCondition::LogWeighted(_)) {
                    return Err(Error::InvalidParameter("nested log weighting".into()));
                }
                base.validate()
            }
            InitialCondition::Custom(p) => match p.support {
                SupportHint::Finite(b) => positive("support bound", b),
                SupportHint::GaussianDominated => Ok(()),
            },
        }
    }

    /// g(y); NaN where the profile is undefined.
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            InitialCondition::Gaussian { c } => (-c * y * y).exp(),
            InitialCondition::UniformDisk { radius } => {
                if y < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            InitialCondition::BesselJ0 { a } => bessel_j0(a * y).unwrap_or(f64::NAN),
            InitialCondition::BesselJ0Squared { a } => {
                let j = bessel_j0(a * y).unwrap_or(f64::NAN);
                j * j
            }
            InitialCondition::ProductIK { a, v } => {
                bessel_ik_product(*v, a * y).unwrap_or(f64::NAN)
            }
            InitialCondition::LogWeighted(base) => {
                let h = base.eval(y);
                if h == 0.0 {
                    0.0
                } else {
                    h * y.ln()
                }
            }
            InitialCondition::Custom(p) => (p.sampler)(y),
        }
    }

    /// Radius beyond which g vanishes identically, if any.
    pub fn support_bound(&self) -> Option<f64> {
        match self {
            InitialCondition::UniformDisk { radius } => Some(*radius),
            InitialCondition::LogWeighted(base) => base.support_bound(),
            InitialCondition::Custom(CustomProfile {
                support: SupportHint::Finite(b),
                ..
            }) => Some(*b),
            _ => None,
        }
    }

    /// Radius beyond which |g| is below machine precision relative to its peak.
    pub fn effective_extent(&self) -> Option<f64> {
        match self {
            InitialCondition::Gaussian { c } => Some((LN_INV_EPS / c).sqrt()),
            InitialCondition::LogWeighted(base) => base.effective_extent(),
            _ => self.support_bound(),
        }
    }

    /// Points where g or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.support_bound().into_iter().collect()
    }

    /// Radial length over which g changes appreciably.
    pub fn length_scale(&self) -> f64 {
        match self {
            InitialCondition::Gaussian { c } => 1.0 / c.sqrt(),
            InitialCondition::UniformDisk { radius } => *radius,
            InitialCondition::BesselJ0 { a }
            | InitialCondition::BesselJ0Squared { a }
            | InitialCondition::ProductIK { a, .. } => 1.0 / a,
            InitialCondition::LogWeighted(base) => base.length_scale(),
            InitialCondition::Custom(p) => match p.support {
                SupportHint::Finite(b) => b,
                SupportHint::GaussianDominated => f64::INFINITY,
            },
        }
    }

    pub fn is_log_weighted(&self) -> bool {
        matches!(self, InitialCondition::LogWeighted(_))
    }

    pub fn is_custom(&self) -> bool {
        match self {
            InitialCondition::Custom(_) => true,
            InitialCondition::LogWeighted(base) => base.is_custom(),
            _ => false,
        }
    }

    /// Short name used in reports.
    pub fn label(&self) -> String {
        match self {
            InitialCondition::Gaussian { c } => format!("gaussian(c={c})"),
            InitialCondition::UniformDisk { radius } => format!("disk(radius={radius})"),
            InitialCondition::BesselJ0 { a } => format!("j0(a={a})"),
            InitialCondition::BesselJ0Squared { a } => format!("j0sq(a={a})"),
            InitialCondition::ProductIK { a, v } => format!("ivkv(a={a},v={v})"),
            InitialCondition::LogWeighted(base) => format!("log*{}", base.label()),
            InitialCondition::Custom(p) => format!("custom({})", p.label),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setup_validation() {
        assert!(PhysicalSetup::new(1.0, 0.0, 0.25).is_ok());
        assert!(PhysicalSetup::new(0.0, 0.0, 0.25).is_err());
        assert!(PhysicalSetup::new(1.0, -1.0, 0.25).is_err());
        assert!(PhysicalSetup::new(1.0, 0.0, 0.0).is_err());
        assert!(PhysicalSetup::new(1e300, 0.0, 1e300).is_err());
        let s = PhysicalSetup::new(0.5, 1.0, 0.5).unwrap();
        assert_eq!(s.four_kt(), 1.0);
        assert_eq!(s.x(), 1.0);
    }

    #[test]
    fn product_ik_rejects_integer_orders() {
        assert!(matches!(
            InitialCondition::product_ik(1.0, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            InitialCondition::product_ik(1.0, 1.0 - 1e-8),
            Err(Error::NearIntegerOrder(_))
        ));
        assert!(InitialCondition::product_ik(1.0, 0.3).is_ok());
    }

    #[test]
    fn profile_values() {
        let g = InitialCondition::product_ik(1.0, 0.5).unwrap();
        let z: f64 = 0.4;
        assert!((g.eval(z) - (1.0 - (-2.0 * z).exp()) / (2.0 * z)).abs() < 1e-14);
        assert_eq!(g.eval(0.0), 1.0);
        let d = InitialCondition::uniform_disk(1.0).unwrap();
        assert_eq!((d.eval(0.999), d.eval(1.0)), (1.0, 0.0));
        let l = InitialCondition::log_weighted(InitialCondition::gaussian(1.0).unwrap()).unwrap();
        assert!((l.eval(2.0) - (-4f64).exp() * 2f64.ln()).abs() < 1e-16);
        assert!(InitialCondition::log_weighted(l).is_err());
    }
}
