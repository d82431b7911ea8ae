//! One function per subcommand, each producing a tidy table.

use rayon::prelude::*;

use risfade::aggregate::{
    clt_cdf_a, clt_moments, exact_cdf_a, expected_a_sq, ln_outage_upper_bound, outage_clt,
    snr_expectation_bounds, SecondMomentMethod, MAX_EXACT_ELEMENTS,
};
use risfade::channel::{FadingParams, Variant};
use risfade::montecarlo::{mc_cdf_a, mc_outage, Execution};
use risfade::optimize::{
    coverage_grid_oracle, coverage_maximize, dinkelbach_optimal_n, exhaustive_optimal_n,
    ActiveCase,
};
use risfade::performance::{
    average_capacity_jensen, average_capacity_mc_seeded, regime_for, JensenRegime,
};
use risfade::Result;

use crate::scenario::Scenario;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    pub trials: u64,
    pub ps_grid: Option<(f64, f64, f64)>,
}

impl RunOptions {
    fn ps_grid(&self, default: (f64, f64, f64)) -> Vec<f64> {
        let (from, to, step) = self.ps_grid.unwrap_or(default);
        let count = ((to - from) / step + 1e-9).floor().max(0.0) as usize;
        (0..=count).map(|i| from + step * i as f64).collect()
    }

    /// Seed for the `index`-th simulated series, spread with SplitMix64.
    fn series_seed(&self, index: u64) -> u64 {
        let mut z = self.seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Modified => "modified",
        Variant::Conventional => "conventional",
    }
}

/// Fading shapes shown side by side: the configured pair plus the two
/// reference pairs, without duplicates.
fn shape_series(cfg: &Scenario) -> Vec<(f64, f64)> {
    let mut out = vec![(cfg.m, cfg.m_s)];
    for pair in [(1.5, 1.5), (2.5, 2.5)] {
        if !out.contains(&pair) {
            out.push(pair);
        }
    }
    out
}

fn both_variants(cfg: &Scenario, m: f64, m_s: f64) -> Result<Vec<FadingParams>> {
    Ok(vec![cfg.conventional(m, m_s)?, cfg.modified(m, m_s)?])
}

fn collect<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

pub fn pdf_surface(cfg: &Scenario) -> Result<Table> {
    let mut t = Table::new(&["variant", "m", "m_s", "h", "f"]);
    let shadowing = [1.5, 2.5, 5.0, 10.0, 50.0];
    for variant in [Variant::Conventional, Variant::Modified] {
        for &m_s in &shadowing {
            let p = match variant {
                Variant::Modified => cfg.modified(cfg.m, m_s)?,
                Variant::Conventional => cfg.conventional(cfg.m, m_s)?,
            };
            for i in 1..=200 {
                let h = 0.02 * i as f64;
                t.push(vec![
                    variant_name(variant).into(),
                    cfg.m.into(),
                    m_s.into(),
                    h.into(),
                    p.pdf(h).into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn clt_check(cfg: &Scenario, run: &RunOptions) -> Result<Table> {
    let p = cfg.modified(cfg.m, cfg.m_s)?;
    let mut t = Table::new(&["n", "z", "t", "exact", "clt", "mc", "mc_half_width"]);
    for (k, n) in [10u32, 50, 100].into_iter().enumerate() {
        let moments = clt_moments(&p, n)?;
        let sigma = moments.sigma2_a.sqrt();
        let zs: Vec<f64> = (0..=32).map(|i| -4.0 + 0.25 * i as f64).collect();
        let grid: Vec<f64> = zs.iter().map(|z| (moments.mu_a + z * sigma).max(0.0)).collect();
        let exact: Vec<f64> = if n <= MAX_EXACT_ELEMENTS {
            collect(grid.par_iter().map(|&x| exact_cdf_a(x, &p, n)).collect())?
        } else {
            vec![f64::NAN; grid.len()]
        };
        let mc = mc_cdf_a(&grid, &p, n, run.trials, run.series_seed(k as u64), Execution::Parallel)?;
        for i in 0..grid.len() {
            t.push(vec![
                n.into(),
                zs[i].into(),
                grid[i].into(),
                exact[i].into(),
                clt_cdf_a(grid[i], &moments).into(),
                mc[i].estimate.into(),
                mc[i].half_width_95.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn snr_bounds(cfg: &Scenario) -> Result<Table> {
    let p = cfg.modified(cfg.m, cfg.m_s)?;
    let mut t = Table::new(&[
        "n",
        "lower",
        "exact",
        "upper",
        "exact_minus_lower_rel",
        "upper_over_exact",
    ]);
    for n in 1..=20u32 {
        let lb = cfg.link_budget(n, cfg.ps_dbm)?;
        let (lower, upper) = snr_expectation_bounds(&p, &lb)?;
        let exact =
            lb.gamma0() * expected_a_sq(&p, n, SecondMomentMethod::MomentIdentity)? / lb.path_loss;
        t.push(vec![
            n.into(),
            lower.into(),
            exact.into(),
            upper.into(),
            ((exact - lower) / exact).into(),
            (upper / exact).into(),
        ]);
    }
    Ok(t)
}

fn regime_name(r: JensenRegime) -> &'static str {
    match r {
        JensenRegime::SmallNLowerBound => "small",
        JensenRegime::LargeNClt => "large",
        JensenRegime::Exact => "exact",
    }
}

pub fn capacity_sweep(cfg: &Scenario, run: &RunOptions) -> Result<Table> {
    let mut t = Table::new(&[
        "variant",
        "m",
        "m_s",
        "n",
        "capacity_mc",
        "mc_half_width",
        "capacity_jensen_exact",
        "capacity_jensen_regime",
        "regime",
    ]);
    let counts = [8u32, 16, 32, 50, 64, 100, 150, 200];
    let mut jobs = Vec::new();
    for (m, m_s) in shape_series(cfg) {
        for p in both_variants(cfg, m, m_s)? {
            for &n in &counts {
                jobs.push((p, n));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .enumerate()
        .map(|(k, (p, n))| -> Result<Vec<Cell>> {
            let lb = cfg.link_budget(*n, cfg.ps_dbm)?;
            let mc = average_capacity_mc_seeded(
                p,
                &lb,
                cfg.bandwidth,
                run.trials,
                run.series_seed(k as u64),
                Execution::Parallel,
            )?;
            let exact = average_capacity_jensen(p, &lb, cfg.bandwidth, JensenRegime::Exact)?;
            let regime = regime_for(*n, cfg.n_th);
            let by_regime = average_capacity_jensen(p, &lb, cfg.bandwidth, regime)?;
            Ok(vec![
                variant_name(p.variant()).into(),
                p.m().into(),
                p.m_s().into(),
                (*n).into(),
                mc.value.into(),
                mc.half_width.into(),
                exact.value.into(),
                by_regime.value.into(),
                regime_name(regime).into(),
            ])
        })
        .collect();
    t.extend(collect(rows)?);
    Ok(t)
}

/// Least-squares slope of `y` against `x`.
fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn outage_sweep(cfg: &Scenario, run: &RunOptions) -> Result<Table> {
    let mut t = Table::new(&[
        "variant",
        "m",
        "m_s",
        "n",
        "ps_dbm",
        "gamma0_db",
        "outage_clt",
        "outage_mc",
        "mc_half_width",
        "mc_low_confidence",
        "upper_bound_log10",
        "bound_slope",
    ]);
    let ps = run.ps_grid((0.0, 40.0, 1.0));
    let mut shapes = shape_series(cfg);
    if !shapes.contains(&(2.0, 1.5)) {
        shapes.push((2.0, 1.5));
    }
    let mut series = Vec::new();
    for (m, m_s) in shapes {
        for p in both_variants(cfg, m, m_s)? {
            for n in [70u32, 150] {
                series.push((p, n));
            }
        }
    }
    let blocks = series
        .par_iter()
        .enumerate()
        .map(|(k, (p, n))| -> Result<Vec<Vec<Cell>>> {
            let mut log_g0 = Vec::new();
            let mut log_bound = Vec::new();
            let mut partial = Vec::new();
            for (j, &dbm) in ps.iter().enumerate() {
                let lb = cfg.link_budget(*n, dbm)?;
                let clt = outage_clt(p, &lb)?;
                let seed = run.series_seed((k * ps.len() + j) as u64);
                let mc = mc_outage(p, &lb, run.trials, seed, Execution::Parallel)?;
                let bound = ln_outage_upper_bound(p, &lb)? / std::f64::consts::LN_10;
                log_g0.push(lb.gamma0().log10());
                log_bound.push(bound);
                partial.push((dbm, 10.0 * lb.gamma0().log10(), clt, mc, bound));
            }
            let slope = fitted_slope(&log_g0, &log_bound);
            Ok(partial
                .into_iter()
                .map(|(dbm, g0db, clt, mc, bound)| {
                    vec![
                        variant_name(p.variant()).into(),
                        p.m().into(),
                        p.m_s().into(),
                        (*n).into(),
                        dbm.into(),
                        g0db.into(),
                        clt.into(),
                        mc.estimate.into(),
                        mc.half_width_95.into(),
                        mc.low_confidence.into(),
                        bound.into(),
                        slope.into(),
                    ]
                })
                .collect())
        })
        .collect();
    for block in collect(blocks)? {
        t.extend(block);
    }
    Ok(t)
}

pub fn optimize_n(cfg: &Scenario, run: &RunOptions) -> Result<Table> {
    let mut t = Table::new(&[
        "sweep",
        "variant",
        "m",
        "m_s",
        "phase_power",
        "z_c",
        "ps_dbm",
        "n_star",
        "ee_star",
        "iterations",
        "oracle_n",
        "oracle_ee",
        "matches_oracle",
    ]);
    let dcfg = cfg.dinkelbach();
    let mut jobs = Vec::new();
    for (m, m_s) in shape_series(cfg) {
        for p in both_variants(cfg, m, m_s)? {
            for pr in [cfg.phase_power, cfg.phase_power_alt] {
                for dbm in run.ps_grid((30.0, 60.0, 5.0)) {
                    jobs.push(("ps", p, pr, cfg.z_c, dbm));
                }
                for z_c in [250.0, 500.0, 1000.0, 1500.0, 2000.0] {
                    jobs.push(("z_c", p, pr, z_c, cfg.ps_dbm));
                }
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(sweep, p, pr, z_c, dbm)| -> Result<Vec<Cell>> {
            let lb = cfg.link_budget_at(1, dbm, z_c)?;
            let pm = cfg.power_model_with(pr);
            let out = dinkelbach_optimal_n(&p, &lb, &pm, cfg.bandwidth, &dcfg)?;
            let (n_o, ee_o) = exhaustive_optimal_n(&p, &lb, &pm, cfg.bandwidth, &dcfg)?;
            Ok(vec![
                sweep.into(),
                variant_name(p.variant()).into(),
                p.m().into(),
                p.m_s().into(),
                pr.into(),
                z_c.into(),
                dbm.into(),
                out.n_star.into(),
                out.ee_star.into(),
                out.iterations.into(),
                n_o.into(),
                ee_o.into(),
                (out.n_star == n_o).into(),
            ])
        })
        .collect();
    t.extend(collect(rows)?);
    Ok(t)
}

fn case_name(c: ActiveCase) -> &'static str {
    match c {
        ActiveCase::Interior => "interior",
        ActiveCase::AltitudeMin => "altitude_min",
        ActiveCase::AltitudeMax => "altitude_max",
        ActiveCase::Infeasible => "infeasible",
    }
}

pub fn optimize_coverage(cfg: &Scenario, run: &RunOptions) -> Result<Table> {
    let mut t = Table::new(&[
        "sweep",
        "variant",
        "m",
        "m_s",
        "n",
        "z_c",
        "ps_dbm",
        "case",
        "r_u",
        "theta_deg",
        "h",
        "grid_derived",
        "w1",
        "w2",
        "w3",
        "oracle_r_u",
        "oracle_theta_deg",
        "oracle_h",
    ]);
    let plp = cfg.path_loss_params();
    let mut jobs = Vec::new();
    for (m, m_s) in shape_series(cfg) {
        for p in both_variants(cfg, m, m_s)? {
            for dbm in run.ps_grid((0.0, 60.0, 5.0)) {
                jobs.push(("ps", p, dbm, cfg.z_c));
            }
            for z_c in [250.0, 500.0, 1000.0, 1500.0, 2000.0, 3000.0] {
                jobs.push(("z_c", p, cfg.ps_dbm, z_c));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(sweep, p, dbm, z_c)| -> Result<Vec<Cell>> {
            let lb = cfg.link_budget_at(cfg.elements, dbm, z_c)?;
            let cov = cfg.coverage_at(z_c);
            let s = coverage_maximize(&p, &lb, &plp, &cov)?;
            let g = coverage_grid_oracle(&p, &lb, &plp, &cov, 500)?;
            Ok(vec![
                sweep.into(),
                variant_name(p.variant()).into(),
                p.m().into(),
                p.m_s().into(),
                cfg.elements.into(),
                z_c.into(),
                dbm.into(),
                case_name(s.case).into(),
                s.radius.into(),
                s.theta_deg.into(),
                s.altitude.into(),
                s.grid_derived.into(),
                s.multipliers[0].into(),
                s.multipliers[1].into(),
                s.multipliers[2].into(),
                g.radius.into(),
                g.theta_deg.into(),
                g.altitude.into(),
            ])
        })
        .collect();
    t.extend(collect(rows)?);
    Ok(t)
}
