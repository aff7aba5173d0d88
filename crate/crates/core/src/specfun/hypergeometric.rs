use num_complex::Complex64;

use super::sum::ComplexCompensatedSum;
use super::Accuracy;
use crate::error::{Error, Result};

/// Kummer's function 1F1(a; b; x) by its ascending series, with complex `a`
/// and real `b`, `x`.
///
/// Terms are accumulated with compensated summation. The loop stops once a
/// term is below `acc.rel_tol` of the running sum and the terms have started
/// to decrease; a terminating series (non-positive integer `a`) stops at the
/// first zero term. Other series at negative `x` alternate, so they go through
/// Kummer's transformation `1F1(a; b; x) = e^x 1F1(b - a; b; -x)` first.
pub fn hyp1f1(a: Complex64, b: f64, x: f64, acc: Accuracy) -> Result<Complex64> {
    if !(b.is_finite() && x.is_finite() && a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::domain("hyp1f1", "non-finite argument"));
    }
    if b <= 0.0 && b == b.round() {
        return Err(Error::domain(
            "hyp1f1",
            format!("b = {b} is a non-positive integer"),
        ));
    }
    if x == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let terminating = a.im == 0.0 && a.re <= 0.0 && a.re == a.re.round();
    if x < 0.0 && !terminating {
        return Ok(hyp1f1(b - a, b, -x, acc)? * x.exp());
    }
    let mut sum = ComplexCompensatedSum::new();
    let mut term = Complex64::new(1.0, 0.0);
    sum.add(term);
    let mut prev_norm = 1.0;
    let mut quiet = 0;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        term = term * (a + kf) * (x / ((b + kf) * (kf + 1.0)));
        if term.re == 0.0 && term.im == 0.0 {
            return Ok(sum.value());
        }
        sum.add(term);
        let norm = term.norm();
        if norm <= prev_norm && norm <= acc.rel_tol * sum.value().norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum.value());
            }
        } else {
            quiet = 0;
        }
        prev_norm = norm;
    }
    Err(Error::NonConvergence {
        what: "hyp1f1 series",
        budget: acc.max_terms,
    })
}

/// Real-argument convenience wrapper around [`hyp1f1`].
pub fn hyp1f1_real(a: f64, b: f64, x: f64, acc: Accuracy) -> Result<f64> {
    hyp1f1(Complex64::new(a, 0.0), b, x, acc).map(|z| z.re)
}

/// Whittaker M_{mu,v}(x) = x^{v+1/2} e^{-x/2} 1F1(v - mu + 1/2; 2v + 1; x).
pub fn whittaker_m(mu: Complex64, v: f64, x: f64, acc: Accuracy) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::domain("whittaker_m", format!("x = {x} must be > 0")));
    }
    let f = hyp1f1(v - mu + 0.5, 2.0 * v + 1.0, x, acc)?;
    Ok(f * (x.powf(v + 0.5) * (-0.5 * x).exp()))
}
