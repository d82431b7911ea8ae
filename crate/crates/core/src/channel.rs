//! Single-element composite fading: a Nakagami-m multipath envelope scaled by
//! an inverse Nakagami-m shadowing term, so that `h²·Ω_s/Ω_m` is F(2m, 2m_s).

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::numerics::{ln_beta, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Ω_s and Ω_m are chosen so that the mean power E[h²] is exactly one.
    Modified,
    /// Ω_s = 1 and Ω_m = Ω, a caller-supplied multipath power.
    Conventional,
}

/// Shape and scale parameters of the per-element envelope distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FadingParams {
    m: f64,
    m_s: f64,
    omega_m: f64,
    omega_s: f64,
    variant: Variant,
    #[serde(skip)]
    ln_norm: f64,
}

/// A non-negative composite envelope draw.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EnvelopeSample(f64);

impl EnvelopeSample {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_shapes(m: f64, m_s: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::domain(format!("multipath shape m must be positive, got {m}")));
    }
    if !(m_s > 1.0 && m_s.is_finite()) {
        return Err(Error::domain(format!(
            "shadowing shape m_s must exceed 1 for a finite mean power, got {m_s}"
        )));
    }
    Ok(())
}

impl FadingParams {
    fn build(m: f64, m_s: f64, omega_m: f64, omega_s: f64, variant: Variant) -> Result<Self> {
        let ln_b = ln_beta(m, m_s)?;
        let ln_norm = std::f64::consts::LN_2 + m * (m * omega_s).ln() + m_s * (m_s * omega_m).ln()
            - ln_b;
        Ok(Self {
            m,
            m_s,
            omega_m,
            omega_s,
            variant,
            ln_norm,
        })
    }

    /// Unit-mean-power parameterization: Ω_s² = m_s/(m_s−1), Ω_m² = (m_s−1)/m_s.
    pub fn modified(m: f64, m_s: f64) -> Result<Self> {
        check_shapes(m, m_s)?;
        let omega_s = (m_s / (m_s - 1.0)).sqrt();
        let omega_m = ((m_s - 1.0) / m_s).sqrt();
        Self::build(m, m_s, omega_m, omega_s, Variant::Modified)
    }

    /// Conventional parameterization with Ω_s = 1 and Ω_m = `omega`.
    pub fn conventional(m: f64, m_s: f64, omega: f64) -> Result<Self> {
        check_shapes(m, m_s)?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("multipath power must be positive, got {omega}")));
        }
        Self::build(m, m_s, omega, 1.0, Variant::Conventional)
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn m_s(&self) -> f64 {
        self.m_s
    }
    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }
    pub fn omega_s(&self) -> f64 {
        self.omega_s
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Natural log of the envelope density; `-inf` where the density is zero.
    pub fn ln_pdf(&self, h: f64) -> f64 {
        if h.is_nan() || h < 0.0 {
            return f64::NEG_INFINITY;
        }
        let (m, ms) = (self.m, self.m_s);
        let power = 2.0 * m - 1.0;
        let lead = if h == 0.0 {
            match power.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Greater) => return f64::NEG_INFINITY,
                Some(std::cmp::Ordering::Less) => return f64::INFINITY,
                _ => 0.0,
            }
        } else {
            power * h.ln()
        };
        self.ln_norm + lead - (m + ms) * (m * self.omega_s * h * h + ms * self.omega_m).ln()
    }

    pub fn pdf(&self, h: f64) -> f64 {
        self.ln_pdf(h).exp()
    }

    /// Closed-form CDF through the regularized incomplete beta function.
    pub fn cdf(&self, h: f64) -> f64 {
        if !(h > 0.0) {
            return 0.0;
        }
        if h.is_infinite() {
            return 1.0;
        }
        let a = self.m * self.omega_s * h * h;
        let z = a / (a + self.m_s * self.omega_m);
        beta_reg(self.m, self.m_s, z)
    }

    /// Upper tail `P(h > x)`, evaluated without cancellation.
    pub fn survival(&self, h: f64) -> f64 {
        if !(h > 0.0) {
            return 1.0;
        }
        if h.is_infinite() {
            return 0.0;
        }
        let b = self.m_s * self.omega_m;
        let z = b / (self.m * self.omega_s * h * h + b);
        beta_reg(self.m_s, self.m, z)
    }

    pub fn mean_envelope(&self) -> f64 {
        let (m, ms) = (self.m, self.m_s);
        let ratio = (ln_beta(m + 0.5, ms - 0.5).unwrap_or(f64::NAN) - ln_beta(m, ms).unwrap_or(f64::NAN)).exp();
        (ms * self.omega_m / (m * self.omega_s)).sqrt() * ratio
    }

    pub fn mean_power(&self) -> f64 {
        match self.variant {
            Variant::Modified => 1.0,
            Variant::Conventional => self.m_s * self.omega_m / ((self.m_s - 1.0) * self.omega_s),
        }
    }

    pub fn variance_envelope(&self) -> f64 {
        let mean = self.mean_envelope();
        (self.mean_power() - mean * mean).max(0.0)
    }

    /// Reusable sampler holding the two gamma laws.
    pub fn sampler(&self) -> EnvelopeSampler {
        EnvelopeSampler {
            multipath: Gamma::new(self.m, 1.0).expect("shape checked at construction"),
            shadowing: Gamma::new(self.m_s, 1.0).expect("shape checked at construction"),
            scale: self.omega_m * self.m_s / (self.omega_s * self.m),
        }
    }

    pub fn sample(&self, src: &mut RandomSource) -> EnvelopeSample {
        self.sampler().sample(src)
    }
}

/// Draws `h = √(Ω_m G_m / m) · √(m_s / (Ω_s G_s))` with `G_m ~ Γ(m, 1)` and
/// `G_s ~ Γ(m_s, 1)`: the first factor is Nakagami-m with spread Ω_m, the
/// second inverse Nakagami-m with `E[1/X²] = Ω_s`.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeSampler {
    multipath: Gamma<f64>,
    shadowing: Gamma<f64>,
    scale: f64,
}

impl EnvelopeSampler {
    pub fn sample(&self, src: &mut RandomSource) -> EnvelopeSample {
        let gm = self.multipath.sample(src);
        let gs = self.shadowing.sample(src);
        EnvelopeSample((self.scale * gm / gs).sqrt())
    }
}

pub fn normalized_params(m: f64, m_s: f64) -> Result<FadingParams> {
    FadingParams::modified(m, m_s)
}

pub fn envelope_pdf(h: f64, p: &FadingParams) -> f64 {
    p.pdf(h)
}

pub fn mean_envelope(p: &FadingParams) -> f64 {
    p.mean_envelope()
}

pub fn mean_power(p: &FadingParams) -> f64 {
    p.mean_power()
}

pub fn variance_envelope(p: &FadingParams) -> f64 {
    p.variance_envelope()
}

pub fn sample_envelope(p: &FadingParams, src: &mut RandomSource) -> EnvelopeSample {
    p.sample(src)
}
