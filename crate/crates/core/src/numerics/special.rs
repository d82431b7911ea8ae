use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use statrs::function::{erf, gamma};

use crate::error::{Error, Result};

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(gamma::ln_gamma(x))
}

/// `ln B(a, b)` assembled from three log-gamma evaluations.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!(
            "ln_beta requires positive arguments, got ({a}, {b})"
        )));
    }
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn gauss_q(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 1.0;
    }
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`gauss_q`] on `(0, 1)`.
///
/// Starts from the inverse complementary error function and polishes with
/// Newton steps on `Q(x) - p`, which keeps the round trip at machine level.
pub fn gauss_q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "gauss_q_inverse requires 0 < p < 1, got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Work in the tail that keeps p small to avoid cancellation in 1 - p.
    let (q, sign) = if p < 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    let mut x = SQRT_2 * erf::erfc_inv(2.0 * q);
    for _ in 0..3 {
        let dens = std_normal_pdf(x);
        if dens == 0.0 {
            break;
        }
        let step = (gauss_q(x) - q) / dens;
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(sign * x)
}
