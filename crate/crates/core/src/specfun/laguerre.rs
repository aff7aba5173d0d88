use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Laguerre polynomial L_n(x) by upward three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
///
/// For x < 0 every term of L_n(x) is positive and the recurrence is free of
/// cancellation.
pub fn laguerre(n: u64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Leading term of the large-n expansion
/// `L_n(x) ~ e^{x/2} (x n)^{-1/4} cos(2 sqrt(n x) - pi/4) / sqrt(pi)`.
pub fn laguerre_asymp(n: u64, x: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("laguerre_asymp", "n must be at least 1"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "laguerre_asymp",
            format!("x = {x} must be > 0"),
        ));
    }
    let nf = n as f64;
    Ok((0.5 * x).exp() / PI.sqrt()
        * (x * nf).powf(-0.25)
        * (2.0 * (nf * x).sqrt() - FRAC_PI_4).cos())
}
