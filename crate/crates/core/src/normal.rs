//! Standard-normal CDF, quantile and Kolmogorov-Smirnov distance.
//!
//! The CDF is built from the error function evaluated by two elementary
//! routes: the Maclaurin series below `x = 3` and a continued fraction
//! above. The routes overlap and are checked against each other in the
//! tests, giving absolute accuracy around 1e-14 without any opaque
//! coefficient tables. The quantile inverts the CDF by bisection plus
//! two Newton steps.

use crate::num::Real;

const FRAC_2_SQRT_PI: f64 = 1.1283791670955126; // 2/sqrt(pi)
const FRAC_1_SQRT_PI: f64 = 0.5641895835477563; // 1/sqrt(pi)
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// erf by its Maclaurin series; accurate for |x| <= 3.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut p = x; // x^(2n+1) / n!
    let mut sum = x;
    let mut sign = 1.0;
    for n in 1..200 {
        p *= x2 / n as f64;
        sign = -sign;
        let term = sign * p / (2 * n + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// erfc by the continued fraction
/// `sqrt(pi) e^(x^2) erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated backward; accurate for x >= 3.
fn erfc_cf(x: f64) -> f64 {
    let mut tail = 0.0f64;
    for k in (1..=120).rev() {
        tail = (k as f64 / 2.0) / (x + tail);
    }
    (-x * x).exp() * FRAC_1_SQRT_PI / (x + tail)
}

/// Complementary error function on the whole line.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x <= 3.0 {
        1.0 - erf_series(x)
    } else if x < 30.0 {
        erfc_cf(x)
    } else {
        0.0
    }
}

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn phi_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() * FRAC_1_SQRT_PI / SQRT_2
}

/// Standard normal quantile for `p` in (0, 1).
pub fn inv_phi(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1), got {p}");
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..2 {
        let d = phi_density(x);
        if d > 0.0 {
            x -= (phi(x) - p) / d;
        }
    }
    x
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical law of
/// `sample` and the standard normal.
pub fn ks_distance_to_std_normal<R: Real>(sample: &[R]) -> f64 {
    assert!(!sample.is_empty());
    let mut xs: Vec<f64> = sample.iter().map(|v| v.as_f64()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = phi(x);
        d = d.max(f - i as f64 / n);
        d = d.max((i + 1) as f64 / n - f);
    }
    d
}
