//! Effective run parameters. Values are entered in the units people quote
//! (dB, dBm, dBm/Hz) and converted to linear watts here, once.

use clap::Args;
use serde::Serialize;

use risfade::aggregate::LinkBudget;
use risfade::channel::FadingParams;
use risfade::optimize::{CoverageConfig, DinkelbachConfig, ThresholdReading};
use risfade::pathloss::{composite_path_loss, db_to_linear, Geometry, PathLossParams};
use risfade::performance::PowerModel;
use risfade::{Error, Result};

#[derive(Debug, Clone, Args, Serialize)]
pub struct Scenario {
    /// Multipath shape m
    #[arg(long, default_value_t = 2.0)]
    pub m: f64,
    /// Shadowing shape m_s (> 1)
    #[arg(long = "m-s", default_value_t = 2.5)]
    pub m_s: f64,
    /// Multipath power Ω for the conventional (unnormalized) variant
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Number of reflecting elements where a single value is needed
    #[arg(long, default_value_t = 100)]
    pub elements: u32,

    /// Bandwidth in Hz
    #[arg(long, default_value_t = 20e6)]
    pub bandwidth: f64,
    /// Carrier frequency in Hz
    #[arg(long, default_value_t = 1.5e9)]
    pub frequency: f64,
    /// LoS excess loss in dB
    #[arg(long = "eta-los", default_value_t = 0.1)]
    pub eta_los_db: f64,
    /// NLoS excess loss in dB
    #[arg(long = "eta-nlos", default_value_t = 20.0)]
    pub eta_nlos_db: f64,
    /// S-curve constant a
    #[arg(long = "s-a", default_value_t = 4.88)]
    pub s_a: f64,
    /// S-curve constant b
    #[arg(long = "s-b", default_value_t = 0.4472)]
    pub s_b: f64,
    /// Path-loss exponent of the command-centre hop
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,

    /// Transmit amplifier efficiency υ
    #[arg(long = "amp-efficiency", default_value_t = 1.1)]
    pub amplifier_efficiency: f64,
    /// Hover power in W
    #[arg(long = "hover-power", default_value_t = 1500.0)]
    pub hover_power: f64,
    /// Circuit power in W
    #[arg(long = "circuit-power", default_value_t = 50.0)]
    pub circuit_power: f64,
    /// Diode forward power per element in W
    #[arg(long = "diode-power", default_value_t = 1e-3)]
    pub diode_power: f64,
    /// Phase-resolution power per element in W
    #[arg(long = "phase-power", default_value_t = 0.078)]
    pub phase_power: f64,
    /// Alternative phase-resolution power used as a second series, in W
    #[arg(long = "phase-power-alt", default_value_t = 0.15)]
    pub phase_power_alt: f64,

    #[arg(long = "n-min", default_value_t = 8)]
    pub n_min: u32,
    #[arg(long = "n-max", default_value_t = 1000)]
    pub n_max: u32,
    /// Small/large element-count crossover
    #[arg(long = "n-th", default_value_t = 50)]
    pub n_th: u32,
    /// Dinkelbach stopping tolerance on the ratio, bits/J
    #[arg(long = "dinkelbach-epsilon", default_value_t = 1e-6)]
    pub dinkelbach_epsilon: f64,
    #[arg(long = "dinkelbach-t-max", default_value_t = 100)]
    pub dinkelbach_t_max: usize,

    /// SNR threshold in dB
    #[arg(long = "snr-threshold-db", default_value_t = 10.0)]
    pub snr_threshold_db: f64,
    /// Target outage probability
    #[arg(long = "op-threshold", default_value_t = 1e-4)]
    pub op_threshold: f64,
    #[arg(long = "h-min", default_value_t = 100.0)]
    pub h_min: f64,
    #[arg(long = "h-max", default_value_t = 2000.0)]
    pub h_max: f64,
    /// Use the literal threshold term in the coverage constraint
    #[arg(long = "literal-threshold", default_value_t = false)]
    pub literal_threshold: bool,

    /// Noise power spectral density in dBm/Hz
    #[arg(long = "noise-dbm-hz", default_value_t = -174.0)]
    pub noise_dbm_hz: f64,
    /// Transmit power in dBm
    #[arg(long = "ps-dbm", default_value_t = 53.0)]
    pub ps_dbm: f64,
    /// Horizontal command-centre to UAV distance in m
    #[arg(long = "z-c", default_value_t = 1000.0)]
    pub z_c: f64,
    /// UAV altitude in m
    #[arg(long, default_value_t = 100.0)]
    pub altitude: f64,
    /// Horizontal UAV to user distance in m
    #[arg(long, default_value_t = 100.0)]
    pub radius: f64,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        FadingParams::modified(self.m, self.m_s)?;
        FadingParams::conventional(self.m, self.m_s, self.omega)?;
        self.path_loss_params().validate()?;
        self.power_model().validate()?;
        self.dinkelbach().validate()?;
        self.coverage().validate()?;
        self.link_budget(self.elements.max(1), self.ps_dbm)?;
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::Domain("bandwidth must be positive".into()));
        }
        if !(self.phase_power_alt > 0.0) {
            return Err(Error::Domain("alternative phase power must be positive".into()));
        }
        if self.elements == 0 {
            return Err(Error::Domain("element count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn modified(&self, m: f64, m_s: f64) -> Result<FadingParams> {
        FadingParams::modified(m, m_s)
    }

    pub fn conventional(&self, m: f64, m_s: f64) -> Result<FadingParams> {
        FadingParams::conventional(m, m_s, self.omega)
    }

    pub fn path_loss_params(&self) -> PathLossParams {
        PathLossParams {
            alpha: self.alpha,
            s_a: self.s_a,
            s_b: self.s_b,
            eta_los_db: self.eta_los_db,
            eta_nlos_db: self.eta_nlos_db,
            frequency: self.frequency,
        }
    }

    pub fn geometry(&self, z_c: f64) -> Result<Geometry> {
        let theta = self.altitude.atan2(self.radius).to_degrees();
        let g = Geometry {
            altitude: self.altitude,
            z_c,
            radius: self.radius,
            theta_deg: theta,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn path_loss(&self, z_c: f64) -> Result<f64> {
        composite_path_loss(&self.geometry(z_c)?, &self.path_loss_params())
    }

    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_dbm_hz + 10.0 * self.bandwidth.log10())
    }

    pub fn snr_threshold(&self) -> f64 {
        db_to_linear(self.snr_threshold_db)
    }

    pub fn link_budget(&self, n: u32, ps_dbm: f64) -> Result<LinkBudget> {
        self.link_budget_at(n, ps_dbm, self.z_c)
    }

    pub fn link_budget_at(&self, n: u32, ps_dbm: f64, z_c: f64) -> Result<LinkBudget> {
        LinkBudget::new(
            dbm_to_watts(ps_dbm),
            self.noise_power(),
            n,
            self.snr_threshold(),
            self.path_loss(z_c)?,
        )
    }

    pub fn power_model(&self) -> PowerModel {
        self.power_model_with(self.phase_power)
    }

    pub fn power_model_with(&self, phase_power: f64) -> PowerModel {
        PowerModel {
            amplifier_efficiency: self.amplifier_efficiency,
            circuit_power: self.circuit_power,
            hover_power: self.hover_power,
            phase_power,
            diode_power: self.diode_power,
        }
    }

    pub fn dinkelbach(&self) -> DinkelbachConfig {
        DinkelbachConfig {
            n_min: self.n_min,
            n_max: self.n_max,
            n_th: self.n_th,
            epsilon: self.dinkelbach_epsilon,
            t_max: self.dinkelbach_t_max,
        }
    }

    pub fn coverage(&self) -> CoverageConfig {
        self.coverage_at(self.z_c)
    }

    pub fn coverage_at(&self, z_c: f64) -> CoverageConfig {
        CoverageConfig {
            h_min: self.h_min,
            h_max: self.h_max,
            op_threshold: self.op_threshold,
            theta_range: (0.1, 89.9),
            z_c,
            reading: if self.literal_threshold {
                ThresholdReading::Literal
            } else {
                ThresholdReading::SqrtK
            },
        }
    }
}
