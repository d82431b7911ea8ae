//! Element-count selection by Dinkelbach's method and coverage-radius
//! maximization by KKT case enumeration.

use std::f64::consts::{LN_10, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::aggregate::{clt_moments, LinkBudget};
use crate::channel::FadingParams;
use crate::error::{Error, Result};
use crate::numerics::{find_root, find_root_system, gauss_q_inverse, RootSpec};
use crate::pathloss::PathLossParams;
use crate::performance::{energy_efficiency, PowerModel};

// ---------------------------------------------------------------------------
// Element count
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DinkelbachConfig {
    pub n_min: u32,
    pub n_max: u32,
    /// Largest count handled with the small-element capacity expression.
    pub n_th: u32,
    /// Stop once successive ratios differ by at most this much (bits/J).
    pub epsilon: f64,
    pub t_max: usize,
}

impl Default for DinkelbachConfig {
    fn default() -> Self {
        Self {
            n_min: 8,
            n_max: 1000,
            n_th: 50,
            epsilon: 1e-6,
            t_max: 100,
        }
    }
}

impl DinkelbachConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.n_min && self.n_min <= self.n_th && self.n_th <= self.n_max) {
            return Err(Error::domain("need 1 <= n_min <= n_th <= n_max"));
        }
        if !(self.epsilon > 0.0) || self.t_max < 2 {
            return Err(Error::domain("need epsilon > 0 and t_max >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    SmallN,
    LargeN,
}

/// Constants of the parametric subproblem `max_N C(N) − r P(N)`.
///
/// `lambda = γ₀E[h]²/PL`, `xi = γ₀VAR[h]/PL`, `theta = 2B/ln 2` and
/// `r_cost = r · (P_r(b) + P_F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkCoefficients {
    pub lambda: f64,
    pub xi: f64,
    pub theta: f64,
    pub r_cost: f64,
}

/// Stationary point of `C(N) − r P(N)` in the given regime.
///
/// Small regime: `R Λ N² − Θ Λ N + R = 0`; large regime:
/// `R Λ N² + (R Ξ − Θ Λ) N + R − Θ Ξ / 2 = 0`. The larger root is the
/// maximizer. `None` means the equation has no positive real root, in which
/// case the objective decreases in `N` everywhere.
pub fn closed_form_n(regime: Regime, c: &LinkCoefficients) -> Result<Option<f64>> {
    let LinkCoefficients {
        lambda,
        xi,
        theta,
        r_cost,
    } = *c;
    if !(r_cost > 0.0 && lambda > 0.0) {
        return Err(Error::domain("closed form needs R > 0 and Λ > 0"));
    }
    let (a, b, c0) = match regime {
        Regime::SmallN => (r_cost * lambda, -theta * lambda, r_cost),
        Regime::LargeN => (
            r_cost * lambda,
            r_cost * xi - theta * lambda,
            r_cost - 0.5 * theta * xi,
        ),
    };
    let disc = b * b - 4.0 * a * c0;
    if disc < 0.0 {
        return Ok(None);
    }
    let root = (-b + disc.sqrt()) / (2.0 * a);
    Ok((root > 0.0).then_some(root))
}

/// Capacity model on a continuous element count.
#[derive(Debug, Clone, Copy)]
struct EeModel {
    lambda: f64,
    xi: f64,
    bandwidth: f64,
    fixed_power: f64,
    per_element: f64,
}

impl EeModel {
    fn capacity(&self, regime: Regime, n: f64) -> f64 {
        let snr = match regime {
            Regime::SmallN => self.lambda * n * n,
            Regime::LargeN => self.lambda * n * n + self.xi * n,
        };
        self.bandwidth * snr.ln_1p() / LN_2
    }

    fn power(&self, n: f64) -> f64 {
        self.fixed_power + self.per_element * n
    }

    fn ee(&self, regime: Regime, n: f64) -> f64 {
        self.capacity(regime, n) / self.power(n)
    }

    fn coefficients(&self, r: f64) -> LinkCoefficients {
        LinkCoefficients {
            lambda: self.lambda,
            xi: self.xi,
            theta: 2.0 * self.bandwidth / LN_2,
            r_cost: r * self.per_element,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DinkelbachStep {
    pub regime: Regime,
    /// Continuous maximizer of the subproblem, clamped to the regime's range.
    pub n: f64,
    /// Ratio evaluated at `n`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DinkelbachOutcome {
    pub n_star: u32,
    pub ee_star: f64,
    pub iterations: usize,
    /// Ratio sequence, phase by phase.
    pub history: Vec<DinkelbachStep>,
    /// `C(N) − r P(N)` at the last continuous iterate and ratio.
    pub final_gap: f64,
    pub final_power: f64,
}

fn run_phase(
    model: &EeModel,
    regime: Regime,
    lo: f64,
    hi: f64,
    start: f64,
    cfg: &DinkelbachConfig,
    iterations: &mut usize,
    history: &mut Vec<DinkelbachStep>,
) -> Result<(f64, f64, f64)> {
    let mut n = start.clamp(lo, hi);
    let mut r = model.ee(regime, n);
    history.push(DinkelbachStep { regime, n, ratio: r });
    loop {
        if *iterations >= cfg.t_max {
            return Err(Error::convergence(
                format!("Dinkelbach iteration limit {} reached", cfg.t_max),
                Some(n),
            ));
        }
        *iterations += 1;
        let next = match closed_form_n(regime, &model.coefficients(r))? {
            Some(v) => v.clamp(lo, hi),
            None => lo,
        };
        let r_next = model.ee(regime, next);
        history.push(DinkelbachStep {
            regime,
            n: next,
            ratio: r_next,
        });
        let done = (r_next - r).abs() <= cfg.epsilon;
        n = next;
        r = r_next;
        if done {
            let gap = model.capacity(regime, n) - r * model.power(n);
            return Ok((n, r, gap));
        }
    }
}

/// Optimal element count under the piecewise energy-efficiency model.
///
/// The large-element phase runs on `[n_th, n_max]`. When its maximizer lands
/// at the lower edge of that range, a second phase runs the small-element
/// expression on `[n_min, n_th]`. The integer answer is the best of the
/// floor and ceiling of each phase's maximizer, each evaluated in the regime
/// its integer value belongs to.
pub fn dinkelbach_optimal_n(
    p: &FadingParams,
    lb: &LinkBudget,
    pm: &PowerModel,
    bandwidth: f64,
    cfg: &DinkelbachConfig,
) -> Result<DinkelbachOutcome> {
    cfg.validate()?;
    lb.validate()?;
    pm.validate()?;
    let scale = lb.gamma0() / lb.path_loss;
    let mean = p.mean_envelope();
    let model = EeModel {
        lambda: scale * mean * mean,
        xi: scale * p.variance_envelope(),
        bandwidth,
        fixed_power: pm.fixed(lb.transmit_power),
        per_element: pm.per_element(),
    };
    let (n_min, n_th, n_max) = (cfg.n_min as f64, cfg.n_th as f64, cfg.n_max as f64);
    let mut iterations = 0;
    let mut history = Vec::new();

    let mut candidates: Vec<u32> = Vec::new();
    let push_pair = |x: f64, lo: u32, hi: u32, out: &mut Vec<u32>| {
        for v in [x.floor(), x.ceil()] {
            out.push((v as u32).clamp(lo, hi));
        }
    };

    let (mut n_cont, mut ratio, mut gap) = if cfg.n_th < cfg.n_max {
        let (n1, r1, g1) = run_phase(
            &model,
            Regime::LargeN,
            n_th,
            n_max,
            n_max,
            cfg,
            &mut iterations,
            &mut history,
        )?;
        push_pair(n1, cfg.n_th + 1, cfg.n_max, &mut candidates);
        (n1, r1, g1)
    } else {
        (n_th, f64::NEG_INFINITY, 0.0)
    };

    if n_cont < n_th + 1.0 {
        let (n2, r2, g2) = run_phase(
            &model,
            Regime::SmallN,
            n_min,
            n_th,
            n_cont,
            cfg,
            &mut iterations,
            &mut history,
        )?;
        push_pair(n2, cfg.n_min, cfg.n_th, &mut candidates);
        if r2 >= ratio || !ratio.is_finite() {
            n_cont = n2;
            ratio = r2;
            gap = g2;
        }
    }

    let mut best: Option<(u32, f64)> = None;
    candidates.sort_unstable();
    candidates.dedup();
    for n in candidates {
        let ee = energy_efficiency(p, &lb.with_elements(n), pm, bandwidth, cfg.n_th)?;
        if best.is_none_or(|(_, b)| ee > b) {
            best = Some((n, ee));
        }
    }
    let (n_star, ee_star) = best.ok_or_else(|| Error::convergence("no candidate", None))?;
    let _ = ratio;
    Ok(DinkelbachOutcome {
        n_star,
        ee_star,
        iterations,
        history,
        final_gap: gap,
        final_power: model.power(n_cont),
    })
}

/// Integer maximizer of the energy efficiency by scanning `[n_min, n_max]`.
pub fn exhaustive_optimal_n(
    p: &FadingParams,
    lb: &LinkBudget,
    pm: &PowerModel,
    bandwidth: f64,
    cfg: &DinkelbachConfig,
) -> Result<(u32, f64)> {
    cfg.validate()?;
    let mut best = (cfg.n_min, f64::NEG_INFINITY);
    for n in cfg.n_min..=cfg.n_max {
        let ee = energy_efficiency(p, &lb.with_elements(n), pm, bandwidth, cfg.n_th)?;
        if ee > best.1 {
            best = (n, ee);
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

/// How the SNR threshold enters the outage constant `M` of the link-budget
/// constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ThresholdReading {
    /// `−10 lg((ξσ_A + μ_A)² / k)`, equivalent to the Gaussian outage bound.
    #[default]
    SqrtK,
    /// `−10 lg(((ξσ_A + μ_A) / k)²)`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub h_min: f64,
    pub h_max: f64,
    /// Target outage probability.
    pub op_threshold: f64,
    /// Elevation search range in degrees.
    pub theta_range: (f64, f64),
    /// Horizontal distance from the command centre to the UAV, metres.
    pub z_c: f64,
    pub reading: ThresholdReading,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        Self {
            h_min: 100.0,
            h_max: 2000.0,
            op_threshold: 1e-4,
            theta_range: (0.1, 89.9),
            z_c: 1000.0,
            reading: ThresholdReading::SqrtK,
        }
    }
}

impl CoverageConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.h_min && self.h_min < self.h_max && self.h_max.is_finite()) {
            return Err(Error::domain("need 0 < h_min < h_max"));
        }
        if !(self.op_threshold > 0.0 && self.op_threshold < 1.0) {
            return Err(Error::domain("outage threshold must lie in (0, 1)"));
        }
        let (lo, hi) = self.theta_range;
        if !(0.0 < lo && lo < hi && hi < 90.0) {
            return Err(Error::domain("elevation range must satisfy 0 < lo < hi < 90"));
        }
        if !(self.z_c >= 0.0 && self.z_c.is_finite()) {
            return Err(Error::domain("z_c must be non-negative"));
        }
        Ok(())
    }

    /// `ξ` with `1 − Q(ξ) = P_out^th`, i.e. `ξ = −Q⁻¹(P_out^th)`.
    pub fn xi(&self) -> Result<f64> {
        Ok(-gauss_q_inverse(self.op_threshold)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActiveCase {
    Interior,
    AltitudeMin,
    AltitudeMax,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageSolution {
    pub radius: f64,
    pub theta_deg: f64,
    pub altitude: f64,
    pub case: ActiveCase,
    pub multipliers: [f64; 3],
    /// The answer comes from the grid scan rather than a KKT solve.
    pub grid_derived: bool,
}

impl CoverageSolution {
    fn infeasible(grid_derived: bool) -> Self {
        Self {
            radius: 0.0,
            theta_deg: f64::NAN,
            altitude: f64::NAN,
            case: ActiveCase::Infeasible,
            multipliers: [0.0; 3],
            grid_derived,
        }
    }
}

const DEG: f64 = PI / 180.0;

/// The constraint functions with everything independent of `(r_u, θ)` folded
/// into one constant.
#[derive(Debug, Clone, Copy)]
pub struct CoverageProblem {
    alpha: f64,
    z_c2: f64,
    eta_gap: f64,
    s_a: f64,
    s_b: f64,
    big_m: f64,
    h_min: f64,
    h_max: f64,
    theta_range: (f64, f64),
}

impl CoverageProblem {
    /// `None` when `ξσ_A + μ_A ≤ 0`: no geometry can then meet the target.
    pub fn new(
        p: &FadingParams,
        lb: &LinkBudget,
        plp: &PathLossParams,
        cfg: &CoverageConfig,
    ) -> Result<Option<Self>> {
        cfg.validate()?;
        plp.validate()?;
        lb.validate()?;
        let moments = clt_moments(p, lb.elements)?;
        let margin = cfg.xi()? * moments.sigma2_a.sqrt() + moments.mu_a;
        if !(margin > 0.0) {
            return Ok(None);
        }
        let k = lb.snr_threshold / lb.gamma0();
        let outage_term = match cfg.reading {
            ThresholdReading::SqrtK => 10.0 * (margin * margin / k).log10(),
            ThresholdReading::Literal => 10.0 * ((margin / k) * (margin / k)).log10(),
        };
        let big_m =
            20.0 * (4.0 * PI / plp.wavelength()).log10() + plp.eta_nlos_db - outage_term;
        Ok(Some(Self {
            alpha: plp.alpha,
            z_c2: cfg.z_c * cfg.z_c,
            eta_gap: plp.eta_los_db - plp.eta_nlos_db,
            s_a: plp.s_a,
            s_b: plp.s_b,
            big_m,
            h_min: cfg.h_min,
            h_max: cfg.h_max,
            theta_range: cfg.theta_range,
        }))
    }

    fn los(&self, theta: f64) -> f64 {
        1.0 / (1.0 + self.s_a * (-self.s_b * (theta - self.s_a)).exp())
    }

    pub fn g1(&self, r: f64, theta: f64) -> f64 {
        let t = (theta * DEG).tan();
        5.0 * self.alpha * (self.z_c2 + r * r * t * t).log10()
            + 20.0 * (r / (theta * DEG).cos()).log10()
            + self.eta_gap * self.los(theta)
            + self.big_m
    }

    pub fn g2(&self, r: f64, theta: f64) -> f64 {
        self.h_min - r * (theta * DEG).tan()
    }

    pub fn g3(&self, r: f64, theta: f64) -> f64 {
        r * (theta * DEG).tan() - self.h_max
    }

    /// `(∂g1/∂r, ∂g1/∂θ)` with θ in degrees.
    pub fn grad_g1(&self, r: f64, theta: f64) -> (f64, f64) {
        let t = (theta * DEG).tan();
        let sec2 = 1.0 + t * t;
        let d = self.z_c2 + r * r * t * t;
        let dr = 10.0 * self.alpha * r * t * t / (d * LN_10) + 20.0 / (r * LN_10);
        let e = (-self.s_b * (theta - self.s_a)).exp();
        let dlos = self.s_a * self.s_b * e / (1.0 + self.s_a * e).powi(2);
        let dtheta = 10.0 * self.alpha * r * r * t * sec2 * DEG / (d * LN_10)
            + 20.0 * t * DEG / LN_10
            + self.eta_gap * dlos;
        (dr, dtheta)
    }

    fn feasible(&self, r: f64, theta: f64, slack: f64) -> bool {
        self.g1(r, theta) <= slack && self.g2(r, theta) <= slack && self.g3(r, theta) <= slack
    }

    /// A radius beyond which `g1 > 0` at every elevation in the search range.
    fn radius_cap(&self) -> f64 {
        let t_lo = (self.theta_range.0 * DEG).tan();
        let lower = |r: f64| {
            5.0 * self.alpha * (self.z_c2 + r * r * t_lo * t_lo).log10()
                + 20.0 * r.log10()
                + self.eta_gap
                + self.big_m
        };
        let mut hi = 1.0;
        while lower(hi) <= 0.0 && hi < 1e12 {
            hi *= 2.0;
        }
        hi
    }

    /// Stationarity, feasibility and complementary-slackness residuals.
    pub fn kkt_residuals(&self, r: f64, theta: f64, w: [f64; 3]) -> KktResiduals {
        let (g1r, g1t) = self.grad_g1(r, theta);
        let t = (theta * DEG).tan();
        let sec2 = 1.0 + t * t;
        let s_r = -1.0 + w[0] * g1r - w[1] * t + w[2] * t;
        let s_t = w[0] * g1t - w[1] * r * sec2 * DEG + w[2] * r * sec2 * DEG;
        let g = [self.g1(r, theta), self.g2(r, theta), self.g3(r, theta)];
        KktResiduals {
            stationarity: s_r.abs().max(s_t.abs()),
            primal: g.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)).max(0.0),
            dual: w.iter().fold(0.0f64, |a, &b| a.max(-b)),
            slackness: w.iter().zip(&g).fold(0.0f64, |a, (wi, gi)| a.max((wi * gi).abs())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal: f64,
    pub dual: f64,
    pub slackness: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.primal).max(self.dual).max(self.slackness)
    }
}

/// `(g1, g2, g3)` at a geometry; `g_i ≤ 0` means satisfied.
pub fn coverage_constraints(
    r: f64,
    theta_deg: f64,
    p: &FadingParams,
    lb: &LinkBudget,
    plp: &PathLossParams,
    cfg: &CoverageConfig,
) -> Result<(f64, f64, f64)> {
    if !(theta_deg > 0.0 && theta_deg < 90.0) {
        return Err(Error::domain("elevation must lie in (0, 90) degrees"));
    }
    match CoverageProblem::new(p, lb, plp, cfg)? {
        Some(prob) => Ok((prob.g1(r, theta_deg), prob.g2(r, theta_deg), prob.g3(r, theta_deg))),
        None => Ok((f64::INFINITY, cfg.h_min - r * (theta_deg * DEG).tan(), r * (theta_deg * DEG).tan() - cfg.h_max)),
    }
}

/// Largest feasible radius on a `resolution × resolution` grid, refined once
/// on a second grid around the first-level winner.
pub fn coverage_grid_oracle(
    p: &FadingParams,
    lb: &LinkBudget,
    plp: &PathLossParams,
    cfg: &CoverageConfig,
    resolution: usize,
) -> Result<CoverageSolution> {
    if resolution < 100 {
        return Err(Error::domain("grid resolution must be at least 100"));
    }
    match CoverageProblem::new(p, lb, plp, cfg)? {
        Some(prob) => Ok(grid_scan(&prob, resolution)),
        None => Ok(CoverageSolution::infeasible(true)),
    }
}

fn scan_rect(prob: &CoverageProblem, r_lo: f64, r_hi: f64, t_lo: f64, t_hi: f64, res: usize) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for j in 0..res {
        let theta = t_lo + (t_hi - t_lo) * j as f64 / (res - 1) as f64;
        if !(theta > 0.0 && theta < 90.0) {
            continue;
        }
        // Largest feasible grid radius in this column.
        for i in (1..res).rev() {
            let r = r_lo + (r_hi - r_lo) * i as f64 / (res - 1) as f64;
            if best.is_some_and(|(br, _)| r <= br) {
                break;
            }
            if r > 0.0 && prob.feasible(r, theta, 0.0) {
                best = Some((r, theta));
                break;
            }
        }
    }
    best
}

fn grid_scan(prob: &CoverageProblem, res: usize) -> CoverageSolution {
    let cap = prob.radius_cap();
    let (t_lo, t_hi) = prob.theta_range;
    let Some((r1, th1)) = scan_rect(prob, 0.0, cap, t_lo, t_hi, res) else {
        return CoverageSolution::infeasible(true);
    };
    let dr = cap / (res - 1) as f64;
    let dt = (t_hi - t_lo) / (res - 1) as f64;
    let (r2, th2) = scan_rect(
        prob,
        (r1 - 2.0 * dr).max(0.0),
        r1 + 2.0 * dr,
        (th1 - 2.0 * dt).max(t_lo),
        (th1 + 2.0 * dt).min(t_hi),
        res,
    )
    .unwrap_or((r1, th1));
    let alt = r2 * (th2 * DEG).tan();
    let case = if (alt - prob.h_min).abs() <= 1e-3 * prob.h_min.max(1.0) * 5.0 {
        ActiveCase::AltitudeMin
    } else if (alt - prob.h_max).abs() <= 5e-3 * prob.h_max {
        ActiveCase::AltitudeMax
    } else {
        ActiveCase::Interior
    };
    CoverageSolution {
        radius: r2,
        theta_deg: th2,
        altitude: alt,
        case,
        multipliers: [f64::NAN; 3],
        grid_derived: true,
    }
}

/// Solves `a·[x, y] = [1, 0]` for the two active multipliers.
fn solve2(a11: f64, a12: f64, a21: f64, a22: f64) -> Option<(f64, f64)> {
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    Some((a22 / det, -a21 / det))
}

/// Points on the altitude curve `r tan θ = h` where `g1` vanishes.
fn altitude_curve_roots(prob: &CoverageProblem, h: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = prob.theta_range;
    let along = |theta: f64| prob.g1(h / (theta * DEG).tan(), theta);
    let samples = 4000;
    let mut out = Vec::new();
    let mut prev_t = lo;
    let mut prev_v = along(lo);
    for i in 1..=samples {
        let t = lo + (hi - lo) * i as f64 / samples as f64;
        let v = along(t);
        if prev_v.signum() != v.signum() {
            let spec = RootSpec::bracket(prev_t, t).with_tolerance(1e-10);
            if let Ok(theta) = find_root(along, &spec) {
                out.push((h / (theta * DEG).tan(), theta));
            }
        }
        prev_t = t;
        prev_v = v;
    }
    out
}

/// Maximum coverage radius subject to the outage, minimum-altitude and
/// maximum-altitude constraints.
///
/// Interior candidates come from solving `g1 = 0, ∂g1/∂θ = 0` from the coarse
/// grid maximum; boundary candidates from the zeros of `g1` along each
/// altitude curve. Candidates with a negative multiplier or violated
/// constraint are dropped. If no KKT point survives while the grid finds a
/// feasible point, the grid answer is returned with `grid_derived` set.
pub fn coverage_maximize(
    p: &FadingParams,
    lb: &LinkBudget,
    plp: &PathLossParams,
    cfg: &CoverageConfig,
) -> Result<CoverageSolution> {
    let Some(prob) = CoverageProblem::new(p, lb, plp, cfg)? else {
        return Ok(CoverageSolution::infeasible(false));
    };
    let coarse = grid_scan(&prob, 200);
    if coarse.case == ActiveCase::Infeasible {
        return Ok(CoverageSolution::infeasible(false));
    }
    let mut candidates: Vec<CoverageSolution> = Vec::new();
    const TOL: f64 = 1e-6;

    // Interior: g1 = 0 and ∂g1/∂θ = 0.
    let spec = RootSpec::point(vec![coarse.radius, coarse.theta_deg])
        .with_tolerance(1e-10)
        .with_max_iterations(200);
    let system = |x: &[f64]| {
        if !(x[0] > 0.0 && x[1] > 0.0 && x[1] < 90.0) {
            return vec![f64::NAN, f64::NAN];
        }
        vec![prob.g1(x[0], x[1]), prob.grad_g1(x[0], x[1]).1]
    };
    if let Ok(x) = find_root_system(system, &spec) {
        let (r, theta) = (x[0], x[1]);
        let (g1r, _) = prob.grad_g1(r, theta);
        let w = [1.0 / g1r, 0.0, 0.0];
        if w[0] >= -1e-9 && prob.feasible(r, theta, TOL) {
            candidates.push(CoverageSolution {
                radius: r,
                theta_deg: theta,
                altitude: r * (theta * DEG).tan(),
                case: ActiveCase::Interior,
                multipliers: w,
                grid_derived: false,
            });
        }
    }

    // Altitude-bound cases.
    for (h, case) in [(prob.h_min, ActiveCase::AltitudeMin), (prob.h_max, ActiveCase::AltitudeMax)] {
        for (r, theta) in altitude_curve_roots(&prob, h) {
            let (g1r, g1t) = prob.grad_g1(r, theta);
            let t = (theta * DEG).tan();
            let sec2 = 1.0 + t * t;
            let sign = if case == ActiveCase::AltitudeMin { -1.0 } else { 1.0 };
            let Some((w1, wb)) = solve2(g1r, sign * t, g1t, sign * r * sec2 * DEG) else {
                continue;
            };
            if w1 < -1e-9 || wb < -1e-9 || !prob.feasible(r, theta, TOL) {
                continue;
            }
            let multipliers = if case == ActiveCase::AltitudeMin {
                [w1, wb, 0.0]
            } else {
                [w1, 0.0, wb]
            };
            candidates.push(CoverageSolution {
                radius: r,
                theta_deg: theta,
                altitude: h,
                case,
                multipliers,
                grid_derived: false,
            });
        }
    }

    let best = candidates
        .into_iter()
        .filter(|c| prob.kkt_residuals(c.radius, c.theta_deg, c.multipliers).max() <= TOL)
        .max_by(|a, b| a.radius.total_cmp(&b.radius));
    Ok(best.unwrap_or_else(|| grid_scan(&prob, 500)))
}
