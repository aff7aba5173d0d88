use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod nodes (positive half, descending) with the embedded
// 7-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Error below which rounding dominates the estimate.
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut abs_sum = kronrod.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, node) in XGK.iter().take(7).enumerate() {
        let dx = half * node;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::domain(
            "quadrature",
            format!("non-finite integrand on [{a}, {b}]"),
        ));
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    Ok(Panel {
        a,
        b,
        value,
        error: error.max(floor),
        floor,
    })
}

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature.
///
/// `breakpoints` must be sorted and define the initial panels. Panels are
/// bisected in order of decreasing error until the summed estimate drops
/// below `max(abs_tol, rel_tol * |I|)`; panels whose estimate has reached the
/// rounding floor are not split further.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two breakpoints".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    let mut settled_value = 0.0;
    let mut settled_error = 0.0;
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod_panel(&f, w[0], w[1])?);
            evaluations += 15;
        }
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((settled_value, settled_error), |(v, e), p| {
                (v + p.value, e + p.error)
            });
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.error <= worst.floor || mid <= worst.a || mid >= worst.b {
            settled_value += worst.value;
            settled_error += worst.error;
            continue;
        }
        if heap.len() + 2 > max_panels {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                budget: max_panels,
            });
        }
        heap.push(kronrod_panel(&f, worst.a, mid)?);
        heap.push(kronrod_panel(&f, mid, worst.b)?);
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(7) - 3.0 * x * x, &[0.0, 2.0], 1e-14, 0.0, 100).unwrap();
        assert!((r.value - (32.0 - 8.0)).abs() < 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn endpoint_singularity_and_oscillation() {
        let r = integrate(|x| x.sqrt().ln(), &[0.0, 1.0], 1e-12, 0.0, 2000).unwrap();
        assert!((r.value + 0.5).abs() < 1e-11, "{r:?}");
        let r = integrate(
            |x| (20.0 * x).cos(),
            &[0.0, 1.0, 2.0, 3.0],
            1e-13,
            0.0,
            2000,
        )
        .unwrap();
        assert!((r.value - (60.0f64).sin() / 20.0).abs() < 1e-13);
        assert!(r.abs_error_estimate <= 1e-13);
    }

    #[test]
    fn budget_exhaustion() {
        let r = integrate(|x| (1.0 / x).sin(), &[1e-9, 1.0], 1e-14, 0.0, 8);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
