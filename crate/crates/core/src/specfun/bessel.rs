use std::f64::consts::{FRAC_PI_4, PI};

use super::gamma::{gamma_real, sin_pi, EULER_GAMMA};
use crate::error::{Error, Result};

const SERIES_J0_MAX: f64 = 5.0;
const HANKEL_J0_MIN: f64 = 25.0;
const SERIES_I0_MAX: f64 = 30.0;
const REFLECTION_KV_MAX: f64 = 2.0;
const KV_GUARD_BAND: f64 = 1e-6;

fn check_finite(function: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(function, format!("non-finite argument {x}")))
    }
}

/// Bessel function J0 for x >= 0 (negative arguments use evenness).
///
/// Power series below 5, Miller's backward recurrence on [5, 25) and the
/// Hankel asymptotic expansion beyond; absolute error stays near 1e-15 for
/// x <= 50.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_finite("bessel_j0", x)?;
    let x = x.abs();
    Ok(if x <= SERIES_J0_MAX {
        j0_series(x)
    } else if x < HANKEL_J0_MIN {
        j0_miller(x)
    } else {
        j0_hankel(x)
    })
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn j0_miller(x: f64) -> f64 {
    // Start well above x; J_n decays super-exponentially once n > x.
    let start = (x + 12.0 * x.cbrt() + 30.0) as usize;
    let start = start + start % 2;
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1e-300; // J_n
    let mut norm = 0.0;
    for n in (1..=start).rev() {
        let prev = n as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if (n - 1) % 2 == 0 && n > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;
    cur / norm
}

fn j0_hankel(x: f64) -> f64 {
    // a_k = prod_{j=1..k} (2j-1)^2 / (k! 8^k)
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= odd * odd * inv8x / k as f64;
        if a >= last {
            break;
        }
        last = a;
        // (-1)^m a_{2m} for P, (-1)^m a_{2m+1} for Q
        match k % 4 {
            1 => q -= a,
            2 => p -= a,
            3 => q += a,
            _ => p += a,
        }
        if a < 1e-17 {
            break;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// e^{-x} I0(x), bounded by 1 for every x >= 0.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check_finite("bessel_i0_scaled", x)?;
    let x = x.abs();
    if x <= SERIES_I0_MAX {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= q / (kf * kf);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return Ok(sum * (-x).exp());
    }
    let inv8x = 1.0 / (8.0 * x);
    let mut a = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = a * odd * odd * inv8x / k as f64;
        if next >= a {
            break;
        }
        a = next;
        sum += a;
        if a < 1e-17 * sum {
            break;
        }
    }
    Ok(sum / ((2.0 * PI).sqrt() * x.sqrt()))
}

/// I_v(x) from its defining power series; negative integer orders fold to |v|.
pub fn bessel_iv(v: f64, x: f64) -> Result<f64> {
    check_finite("bessel_iv", v)?;
    check_finite("bessel_iv", x)?;
    if x < 0.0 {
        return Err(Error::domain("bessel_iv", format!("x = {x} must be >= 0")));
    }
    let v = if v < 0.0 && v == v.round() { -v } else { v };
    if x == 0.0 {
        return Ok(if v == 0.0 {
            1.0
        } else if v > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half.powf(v) / gamma_real(v + 1.0)?;
    let mut sum = term;
    let mut peak = term.abs();
    for n in 1..5000 {
        let nf = n as f64;
        term *= q / (nf * (v + nf));
        sum += term;
        peak = peak.max(term.abs());
        if term.abs() < 1e-17 * peak && nf > half {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "bessel_iv series",
        budget: 5000,
    })
}

/// K_v(x) for non-integer v.
///
/// Small arguments use `K_v = pi (I_{-v} - I_v) / (2 sin(pi v))`; above x = 2,
/// where that difference cancels, the integral `int_0^inf e^{-x cosh t}
/// cosh(v t) dt` is summed by the trapezoid rule.
pub fn bessel_kv(v: f64, x: f64) -> Result<f64> {
    check_finite("bessel_kv", v)?;
    check_finite("bessel_kv", x)?;
    if (v - v.round()).abs() <= KV_GUARD_BAND {
        return Err(Error::NearIntegerOrder(v));
    }
    if x <= 0.0 {
        return Err(Error::domain("bessel_kv", format!("x = {x} must be > 0")));
    }
    if x <= REFLECTION_KV_MAX {
        let num = bessel_iv(-v, x)? - bessel_iv(v, x)?;
        return Ok(PI * num / (2.0 * sin_pi(v)));
    }
    Ok(kv_scaled_integral(v, x) * (-x).exp())
}

/// e^{x} K_v(x) = int_0^inf exp(-x (cosh t - 1)) cosh(v t) dt.
///
/// The integrand is entire with |f| <= e^{x} on |Im t| = pi/2, so the
/// trapezoid error is about e^{x - pi^2/h}.
fn kv_scaled_integral(v: f64, x: f64) -> f64 {
    let h = (PI * PI / (x + 40.0)).min(0.2);
    let t_max = (1.0 + 45.0 / x).acosh() + 1.0;
    let n = (t_max / h).ceil() as usize;
    let mut sum = 0.5;
    for k in 1..=n {
        let t = k as f64 * h;
        let e = x * (t.cosh() - 1.0);
        if e > 60.0 {
            break;
        }
        sum += (-e).exp() * (v * t).cosh();
    }
    sum * h
}

/// K0(x) for x > 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_finite("bessel_k0", x)?;
    if x <= 0.0 {
        return Err(Error::domain("bessel_k0", format!("x = {x} must be > 0")));
    }
    if x <= REFLECTION_KV_MAX {
        return Ok(k0_small(x));
    }
    Ok(kv_scaled_integral(0.0, x) * (-x).exp())
}

/// e^{x} K0(x) for x > 0.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    check_finite("bessel_k0_scaled", x)?;
    if x <= 0.0 {
        return Err(Error::domain(
            "bessel_k0_scaled",
            format!("x = {x} must be > 0"),
        ));
    }
    if x <= REFLECTION_KV_MAX {
        return Ok(k0_small(x) * x.exp());
    }
    Ok(kv_scaled_integral(0.0, x))
}

// K0 = -(ln(x/2) + gamma) I0(x) + sum (x^2/4)^k / (k!)^2 H_k
fn k0_small(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// I_v(x) K_v(x) for non-integer v in (0, 1) and x >= 0.
///
/// At x = 0 the product tends to 1/(2v). Beyond x = 600 the large-argument
/// expansion `1/(2x) (1 - (mu-1)/(2 (2x)^2) + ...)`, mu = 4v^2, avoids
/// overflow in the individual factors.
pub fn bessel_ik_product(v: f64, x: f64) -> Result<f64> {
    check_finite("bessel_ik_product", x)?;
    if (v - v.round()).abs() <= KV_GUARD_BAND {
        return Err(Error::NearIntegerOrder(v));
    }
    if x < 0.0 {
        return Err(Error::domain(
            "bessel_ik_product",
            format!("x = {x} must be >= 0"),
        ));
    }
    if x == 0.0 {
        if v > 0.0 {
            return Ok(0.5 / v);
        }
        return Err(Error::domain(
            "bessel_ik_product",
            "singular at x = 0 for v < 0",
        ));
    }
    if x <= 600.0 {
        return Ok(bessel_iv(v, x)? * bessel_kv(v, x)?);
    }
    Ok(ik_product_asymptotic(v, x))
}

fn ik_product_asymptotic(v: f64, x: f64) -> f64 {
    let mu = 4.0 * v * v;
    let z2 = 4.0 * x * x;
    let mut coeff = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        coeff *= -(odd / (2.0 * kf)) * (mu - odd * odd) / z2;
        sum += coeff;
        if coeff.abs() < 1e-17 {
            break;
        }
    }
    sum / (2.0 * x)
}
