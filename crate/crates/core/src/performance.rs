//! Power consumption, average capacity and energy efficiency.
//!
//! Capacities are in bits per second (base-2 logarithm).

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::aggregate::{
    clt_moments, expected_a_sq, snr_expectation_bounds, snr_expectation_clt, LinkBudget,
    SecondMomentMethod,
};
use crate::channel::FadingParams;
use crate::error::{Error, Result};
use crate::montecarlo::{mc_capacity, Execution};
use crate::numerics::RandomSource;

/// Smallest trial count accepted by [`average_capacity_mc`].
pub const MIN_CAPACITY_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Transmit amplifier efficiency υ; the amplifier draws `P_s / υ`.
    pub amplifier_efficiency: f64,
    pub circuit_power: f64,
    pub hover_power: f64,
    /// Phase-resolution power per element, `P_r(b)`.
    pub phase_power: f64,
    /// Forward-biased diode power per element.
    pub diode_power: f64,
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.amplifier_efficiency,
            self.circuit_power,
            self.hover_power,
            self.phase_power,
            self.diode_power,
        ];
        if fields.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::domain("power model entries must be positive and finite"));
        }
        Ok(())
    }

    /// Power drawn per reflecting element.
    pub fn per_element(&self) -> f64 {
        self.phase_power + self.diode_power
    }

    /// Power that does not scale with the element count.
    pub fn fixed(&self, transmit_power: f64) -> f64 {
        transmit_power / self.amplifier_efficiency + self.circuit_power + self.hover_power
    }
}

pub fn total_power(pm: &PowerModel, transmit_power: f64, n: u32) -> f64 {
    pm.fixed(transmit_power) + n as f64 * pm.per_element()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapacityMethod {
    MonteCarlo,
    JensenUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value: f64,
    /// 95% half-width; zero for deterministic routes.
    pub half_width: f64,
    pub method: CapacityMethod,
}

/// Which expression for `E[γ]` enters the Jensen capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JensenRegime {
    /// Lower end of the `E[γ]` bracket, `γ₀ (N E[h])² / PL`.
    SmallNLowerBound,
    /// Gaussian moments, `γ₀ (μ_A² + σ_A²) / PL`.
    LargeNClt,
    /// `γ₀ E[A²] / PL` from the moment identity.
    Exact,
}

/// Small-element regime up to and including `n_th`, Gaussian beyond.
pub fn regime_for(n: u32, n_th: u32) -> JensenRegime {
    if n <= n_th {
        JensenRegime::SmallNLowerBound
    } else {
        JensenRegime::LargeNClt
    }
}

fn check_bandwidth(bandwidth: f64) -> Result<()> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::domain("bandwidth must be positive"));
    }
    Ok(())
}

/// Monte Carlo estimate of `B E[log₂(1 + γ)]`; the run seed is drawn from `src`.
pub fn average_capacity_mc(
    p: &FadingParams,
    lb: &LinkBudget,
    bandwidth: f64,
    trials: u64,
    src: &mut RandomSource,
) -> Result<CapacityEstimate> {
    average_capacity_mc_seeded(p, lb, bandwidth, trials, src.next_u64(), Execution::default())
}

pub fn average_capacity_mc_seeded(
    p: &FadingParams,
    lb: &LinkBudget,
    bandwidth: f64,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<CapacityEstimate> {
    check_bandwidth(bandwidth)?;
    if trials < MIN_CAPACITY_TRIALS {
        return Err(Error::domain(format!(
            "at least {MIN_CAPACITY_TRIALS} trials are required, got {trials}"
        )));
    }
    let report = mc_capacity(p, lb, bandwidth, trials, seed, exec)?;
    Ok(CapacityEstimate {
        value: report.estimate,
        half_width: report.half_width_95,
        method: CapacityMethod::MonteCarlo,
    })
}

/// Mean SNR under the given regime.
pub fn mean_snr(p: &FadingParams, lb: &LinkBudget, regime: JensenRegime) -> Result<f64> {
    lb.validate()?;
    Ok(match regime {
        JensenRegime::SmallNLowerBound => snr_expectation_bounds(p, lb)?.0,
        JensenRegime::LargeNClt => snr_expectation_clt(&clt_moments(p, lb.elements)?, lb),
        JensenRegime::Exact => {
            lb.gamma0() * expected_a_sq(p, lb.elements, SecondMomentMethod::MomentIdentity)?
                / lb.path_loss
        }
    })
}

/// `B log₂(1 + E[γ])`, an upper bound on the average capacity by concavity.
pub fn average_capacity_jensen(
    p: &FadingParams,
    lb: &LinkBudget,
    bandwidth: f64,
    regime: JensenRegime,
) -> Result<CapacityEstimate> {
    check_bandwidth(bandwidth)?;
    Ok(CapacityEstimate {
        value: bandwidth * mean_snr(p, lb, regime)?.ln_1p() / std::f64::consts::LN_2,
        half_width: 0.0,
        method: CapacityMethod::JensenUpper,
    })
}

/// Jensen capacity over total power, with the regime picked by `n` against `n_th`.
pub fn energy_efficiency(
    p: &FadingParams,
    lb: &LinkBudget,
    pm: &PowerModel,
    bandwidth: f64,
    n_th: u32,
) -> Result<f64> {
    pm.validate()?;
    let cap = average_capacity_jensen(p, lb, bandwidth, regime_for(lb.elements, n_th))?;
    Ok(cap.value / total_power(pm, lb.transmit_power, lb.elements))
}
