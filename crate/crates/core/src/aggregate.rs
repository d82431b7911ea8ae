//! Distribution of the coherent sum `A = Σ h_i` of `N` i.i.d. envelopes and
//! the resulting SNR `γ = γ₀ A² / PL`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::FadingParams;
use crate::error::{Error, Result};
use crate::numerics::{
    find_root, gauss_q, integrate, integrate_oscillatory, integrate_partitioned, ln_beta,
    ln_gamma, try_derivative2, Kernel, QuadratureSpec, RootSpec,
};

/// Largest element count accepted by the characteristic-function inversion.
pub const MAX_EXACT_ELEMENTS: u32 = 64;

/// Slack beyond `[0, 1]` tolerated in an inverted CDF before it is rejected.
pub const CDF_CLAMP_TOLERANCE: f64 = 5e-3;

/// Transmit side and link constants entering the SNR `γ₀ A² / PL`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Watts.
    pub transmit_power: f64,
    /// Watts.
    pub noise_power: f64,
    pub elements: u32,
    /// Linear SNR threshold γ_th.
    pub snr_threshold: f64,
    /// Linear product of both hop losses.
    pub path_loss: f64,
}

impl LinkBudget {
    pub fn new(
        transmit_power: f64,
        noise_power: f64,
        elements: u32,
        snr_threshold: f64,
        path_loss: f64,
    ) -> Result<Self> {
        let lb = Self {
            transmit_power,
            noise_power,
            elements,
            snr_threshold,
            path_loss,
        };
        lb.validate()?;
        Ok(lb)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !(positive(self.transmit_power)
            && positive(self.noise_power)
            && positive(self.snr_threshold)
            && positive(self.path_loss))
        {
            return Err(Error::domain("link budget quantities must be positive and finite"));
        }
        if self.elements == 0 {
            return Err(Error::domain("element count must be at least 1"));
        }
        Ok(())
    }

    /// Average transmit SNR `P_s / N_0`.
    pub fn gamma0(&self) -> f64 {
        self.transmit_power / self.noise_power
    }

    pub fn with_elements(mut self, elements: u32) -> Self {
        self.elements = elements;
        self
    }

    pub fn with_transmit_power(mut self, watts: f64) -> Self {
        self.transmit_power = watts;
        self
    }

    /// Envelope-sum value `√(PL γ_th / γ₀)` at which γ equals the threshold.
    pub fn amplitude_threshold(&self) -> f64 {
        (self.path_loss * self.snr_threshold / self.gamma0()).sqrt()
    }
}

/// Gaussian surrogate moments of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltMoments {
    pub mu_a: f64,
    pub sigma2_a: f64,
}

fn check_elements(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("element count must be at least 1"));
    }
    Ok(())
}

/// Quadrature settings for characteristic-function evaluations.
fn cf_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-12, 1e-10)
}

/// `E[e^{jωh}]` for one element.
pub fn char_fn_single(omega: f64, p: &FadingParams) -> Result<Complex64> {
    char_fn_single_with(omega, p, &cf_spec())
}

fn char_fn_single_with(omega: f64, p: &FadingParams, spec: &QuadratureSpec) -> Result<Complex64> {
    if omega == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let re = integrate_oscillatory(|h| p.pdf(h), omega, Kernel::Cos, spec)?;
    let im = integrate_oscillatory(|h| p.pdf(h), omega, Kernel::Sin, spec)?;
    Ok(Complex64::new(re, im))
}

/// `E[e^{jωA}] = φ_h(ω)^N`, raised in log-polar form.
pub fn char_fn_sum(omega: f64, p: &FadingParams, n: u32) -> Result<Complex64> {
    check_elements(n)?;
    Ok(power_log_polar(char_fn_single(omega, p)?, n))
}

fn power_log_polar(z: Complex64, n: u32) -> Complex64 {
    if n == 1 {
        return z;
    }
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((n as f64 * r.ln()).exp(), n as f64 * z.arg())
}

/// CDF of `A` at `t` by Gil-Pelaez inversion of the characteristic function.
///
/// `F(t) = ½ − (1/π) ∫₀^∞ Im(e^{−jωt} φ_A(ω)) / ω dω`. The result is clamped
/// to `[0, 1]`; a raw value further than [`CDF_CLAMP_TOLERANCE`] outside is an
/// accuracy error.
pub fn exact_cdf_a(t: f64, p: &FadingParams, n: u32) -> Result<f64> {
    check_elements(n)?;
    if n > MAX_EXACT_ELEMENTS {
        return Err(Error::domain(format!(
            "exact inversion is limited to N <= {MAX_EXACT_ELEMENTS}; use the Gaussian approximation for N = {n}"
        )));
    }
    if t.is_nan() {
        return Err(Error::domain("CDF argument is NaN"));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let inner = cf_spec();
    let outer = QuadratureSpec::default().with_tolerances(1e-9, 1e-8);
    let failure = std::cell::Cell::new(None);
    let integrand = |w: f64| {
        match char_fn_single_with(w, p, &inner) {
            Ok(phi) => {
                let rotated = power_log_polar(phi, n) * Complex64::from_polar(1.0, -w * t);
                rotated.im / w
            }
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    // Cut where the phase e^{-jωt} flips sign; the first break sits at the
    // first zero of sin(ωt).
    let half = PI / t;
    let raw = integrate_partitioned(integrand, 0.0, half, half, &outer);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let value = 0.5 - raw? / PI;
    if !(-CDF_CLAMP_TOLERANCE..=1.0 + CDF_CLAMP_TOLERANCE).contains(&value) {
        return Err(Error::Accuracy {
            message: format!("inverted CDF at t = {t} left [0, 1]"),
            estimate: value,
            error: (value - value.clamp(0.0, 1.0)).abs(),
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

pub fn clt_moments(p: &FadingParams, n: u32) -> Result<CltMoments> {
    check_elements(n)?;
    let n = n as f64;
    Ok(CltMoments {
        mu_a: n * p.mean_envelope(),
        sigma2_a: n * p.variance_envelope(),
    })
}

pub fn clt_cdf_a(a: f64, moments: &CltMoments) -> f64 {
    1.0 - gauss_q((a - moments.mu_a) / moments.sigma2_a.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SecondMomentMethod {
    /// Second derivative at the origin of `1 − Re φ_A(ω)`, built from quadrature.
    MgfDerivative,
    /// `N E[h²] + N(N−1) E[h]²`.
    MomentIdentity,
}

/// `E[A²]` by one of two independent routes.
pub fn expected_a_sq(p: &FadingParams, n: u32, method: SecondMomentMethod) -> Result<f64> {
    check_elements(n)?;
    match method {
        SecondMomentMethod::MomentIdentity => {
            let nf = n as f64;
            let mean = p.mean_envelope();
            Ok(nf * p.mean_power() + nf * (nf - 1.0) * mean * mean)
        }
        SecondMomentMethod::MgfDerivative => {
            // The real-argument MGF E[e^{sh}] diverges for every s > 0 because
            // the envelope has a polynomial tail, so the derivative is taken
            // along the imaginary axis: -d²/dω² Re φ_A(ω) at 0 is E[A²].
            let step = 1e-3;
            let g = |w| one_minus_re_cf_sum(w, p, n);
            let coarse = try_derivative2(g, 0.0, step)?;
            let ms = p.m_s();
            if ms >= 2.0 {
                return Ok(coarse);
            }
            // E[h⁴] is infinite here and the difference quotient carries a
            // bias of order step^(2 m_s − 2); cancel it by extrapolation.
            let fine = try_derivative2(g, 0.0, 0.5 * step)?;
            let k = 2f64.powf(2.0 * ms - 2.0);
            Ok((k * fine - coarse) / (k - 1.0))
        }
    }
}

/// `1 − cos` tail integral `∫ₓ^∞ (1 − cos ωh) f(h) dh`.
fn tail_one_minus_cos(omega: f64, x: f64, p: &FadingParams, spec: &QuadratureSpec) -> Result<f64> {
    let half = PI / omega;
    let k = (x / half - 0.5).ceil().max(0.0);
    let mut first = (k + 0.5) * half;
    if first <= x {
        first += half;
    }
    let cos_tail = integrate_partitioned(|h| p.pdf(h) * (omega * h).cos(), x, first, half, spec)?;
    Ok(p.survival(x) - cos_tail)
}

/// `(D, S) = (1 − Re φ_h(ω), Im φ_h(ω))` without cancellation at small ω.
fn cf_defect_single(omega: f64, p: &FadingParams) -> Result<(f64, f64)> {
    if omega == 0.0 {
        return Ok((0.0, 0.0));
    }
    let w = omega.abs();
    let spec = QuadratureSpec::default().with_tolerances(1e-300, 1e-11);
    // Most of the mass lies below the 1 − 1e-3 quantile; integrate the
    // non-negative 2 sin²(ωh/2) weight there directly.
    let cut = find_root(
        |h| p.survival(h) - 1e-3,
        &RootSpec::bracket(0.0, 1e6).with_tolerance(1e-9),
    )?;
    let head = integrate(|h| 2.0 * (0.5 * w * h).sin().powi(2) * p.pdf(h), 0.0, cut, &spec)?;
    let d = if w * cut < 1e-2 {
        // The cosine completes no meaningful oscillation before the density
        // has decayed; a plain mapped integral is cheaper and just as exact.
        head + integrate(
            |h| 2.0 * (0.5 * w * h).sin().powi(2) * p.pdf(h),
            cut,
            f64::INFINITY,
            &spec.with_truncation_point(cut.max(1.0)),
        )?
    } else {
        head + tail_one_minus_cos(w, cut, p, &spec)?
    };
    let s_spec = QuadratureSpec::default().with_tolerances(1e-300, 1e-11);
    let s = integrate_oscillatory(|h| p.pdf(h), w, Kernel::Sin, &s_spec)?;
    Ok((d, if omega < 0.0 { -s } else { s }))
}

/// `1 − Re φ_A(ω)` evaluated stably for small ω.
fn one_minus_re_cf_sum(omega: f64, p: &FadingParams, n: u32) -> Result<f64> {
    let (d, s) = cf_defect_single(omega, p)?;
    // φ_h = 1 + w with w = −D + jS; log(1 + w) split into real and imaginary parts.
    let log_re = 0.5 * (-2.0 * d + d * d + s * s).ln_1p();
    let log_im = s.atan2(1.0 - d);
    let x = n as f64 * log_re;
    let y = n as f64 * log_im;
    // 1 − Re e^{x + jy} = −expm1(x) + 2 e^x sin²(y/2)
    Ok(-x.exp_m1() + 2.0 * x.exp() * (0.5 * y).sin().powi(2))
}

/// Bracket on `E[γ]` from `E[h]² ≤ E[h²]`: `(γ₀ (N E[h])² / PL, γ₀ N² E[h²] / PL)`.
///
/// With unit mean power the upper end is `γ₀ N² / PL`.
pub fn snr_expectation_bounds(p: &FadingParams, lb: &LinkBudget) -> Result<(f64, f64)> {
    lb.validate()?;
    let n = lb.elements as f64;
    let scale = lb.gamma0() / lb.path_loss;
    let mean = p.mean_envelope();
    Ok((scale * (n * mean).powi(2), scale * n * n * p.mean_power()))
}

/// `E[γ] = γ₀ (μ_A² + σ_A²) / PL`.
pub fn snr_expectation_clt(moments: &CltMoments, lb: &LinkBudget) -> f64 {
    lb.gamma0() * (moments.mu_a * moments.mu_a + moments.sigma2_a) / lb.path_loss
}

/// Outage `P(γ < γ_th)` under the Gaussian approximation of `A`.
pub fn outage_clt(p: &FadingParams, lb: &LinkBudget) -> Result<f64> {
    lb.validate()?;
    let moments = clt_moments(p, lb.elements)?;
    Ok(clt_cdf_a(lb.amplitude_threshold(), &moments))
}

/// Natural log of [`outage_upper_bound`].
pub fn ln_outage_upper_bound(p: &FadingParams, lb: &LinkBudget) -> Result<f64> {
    lb.validate()?;
    let (m, ms) = (p.m(), p.m_s());
    let n = lb.elements as f64;
    let per_element = LN_2 + m * (m * p.omega_s() / (ms * p.omega_m())).ln() + ln_gamma(2.0 * m)?
        - ln_beta(m, ms)?;
    let ratio = lb.snr_threshold * lb.path_loss / lb.gamma0();
    Ok(n * per_element + n * m * ratio.ln() - (2.0 * n * m).ln() - ln_gamma(2.0 * n * m)?)
}

/// High-SNR outage bound obtained by dropping the shadowing denominator of
/// each element density; decays as `γ₀^{−Nm}`.
pub fn outage_upper_bound(p: &FadingParams, lb: &LinkBudget) -> Result<f64> {
    Ok(ln_outage_upper_bound(p, lb)?.exp())
}
