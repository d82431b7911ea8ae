//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use risfade::aggregate::{
    clt_cdf_a, clt_moments, exact_cdf_a, expected_a_sq, ln_outage_upper_bound, outage_clt,
    snr_expectation_bounds, LinkBudget, SecondMomentMethod,
};
use risfade::channel::FadingParams;
use risfade::montecarlo::{sample_sums, Execution};
use risfade::numerics::{integrate, QuadratureSpec, RandomSource};
use risfade::optimize::{
    coverage_grid_oracle, coverage_maximize, dinkelbach_optimal_n, exhaustive_optimal_n,
    ActiveCase, CoverageConfig, CoverageProblem, DinkelbachConfig, ThresholdReading,
};
use risfade::pathloss::{composite_path_loss, Geometry, PathLossParams};
use risfade::performance::PowerModel;

type Outcome = Result<String, String>;

const BANDWIDTH: f64 = 20e6;

fn dbm(x: f64) -> f64 {
    10f64.powf((x - 30.0) / 10.0)
}

fn plp() -> PathLossParams {
    PathLossParams {
        alpha: 2.0,
        s_a: 4.88,
        s_b: 0.4472,
        eta_los_db: 0.1,
        eta_nlos_db: 20.0,
        frequency: 1.5e9,
    }
}

fn noise() -> f64 {
    dbm(-174.0 + 10.0 * BANDWIDTH.log10())
}

fn default_path_loss(z_c: f64) -> f64 {
    let g = Geometry {
        altitude: 100.0,
        z_c,
        radius: 100.0,
        theta_deg: 45.0,
    };
    composite_path_loss(&g, &plp()).unwrap()
}

fn link(n: u32, ps_dbm: f64, z_c: f64) -> LinkBudget {
    LinkBudget::new(dbm(ps_dbm), noise(), n, 10.0, default_path_loss(z_c)).unwrap()
}

fn power_model(phase_power: f64) -> PowerModel {
    PowerModel {
        amplifier_efficiency: 1.1,
        circuit_power: 50.0,
        hover_power: 1500.0,
        phase_power,
        diode_power: 1e-3,
    }
}

/// Kolmogorov distance between sorted samples and a continuous CDF.
fn ks_sorted(sorted: &[f64], cdf: impl Fn(usize, f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(i, x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn normalization() -> Outcome {
    let mut rng = RandomSource::new(11);
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut worst_power: f64 = 0.0;
    for _ in 0..20 {
        let m = 0.3 + 4.7 * rng.uniform();
        let m_s = 1.05 + 18.95 * rng.uniform();
        let p = FadingParams::modified(m, m_s).map_err(|e| e.to_string())?;
        let mass = integrate(|h| p.pdf(h), 0.0, f64::INFINITY, &spec).map_err(|e| e.to_string())?;
        worst = worst.max((mass - 1.0).abs());
        if p.mean_power() != 1.0 {
            return Err(format!("mean_power = {} at ({m}, {m_s})", p.mean_power()));
        }
        // Independent check of the normalization identity from the scale factors.
        let identity = m_s * p.omega_m() / ((m_s - 1.0) * p.omega_s());
        worst_power = worst_power.max((identity - 1.0).abs());
    }
    let msg = format!("max |mass - 1| = {worst:.2e}, max |scale identity - 1| = {worst_power:.2e}");
    if worst <= 1e-8 && worst_power <= 1e-14 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sampler_fidelity() -> Outcome {
    let spec = QuadratureSpec::default().with_tolerances(1e-15, 1e-12);
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, (m, m_s)) in [(1.0, 1.5), (2.0, 2.5), (3.5, 10.0)].into_iter().enumerate() {
        let p = FadingParams::modified(m, m_s).unwrap();
        let sampler = p.sampler();
        let mut rng = RandomSource::with_stream(2024, k as u64);
        let h = sorted((0..1_000_000).map(|_| sampler.sample(&mut rng).value()).collect());

        // Envelope CDF accumulated by quadrature of the density between
        // consecutive order statistics.
        let mut cum = vec![0.0; h.len()];
        let mut acc = integrate(|x| p.pdf(x), 0.0, h[0], &spec).unwrap();
        cum[0] = acc;
        for i in 1..h.len() {
            if h[i] > h[i - 1] {
                acc += integrate(|x| p.pdf(x), h[i - 1], h[i], &spec).unwrap();
            }
            cum[i] = acc;
        }
        let d_env = ks_sorted(&h, |i, _| cum[i]);

        let f = FisherSnedecor::new(2.0 * m, 2.0 * m_s).unwrap();
        let ratio = p.omega_s() / p.omega_m();
        let t: Vec<f64> = h.iter().map(|x| x * x * ratio).collect();
        let d_f = ks_sorted(&t, |_, x| f.cdf(x));
        ok &= d_env <= 0.002 && d_f <= 0.002;
        lines.push(format!("({m},{m_s}) D_env={d_env:.2e} D_F={d_f:.2e}"));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn empirical_cdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

fn gil_pelaez_vs_mc() -> Outcome {
    let p = FadingParams::modified(2.0, 2.5).unwrap();
    let mut probs: Vec<f64> = vec![0.001, 0.005];
    probs.extend((1..100).map(|k| k as f64 / 100.0));
    probs.extend([0.995, 0.999]);
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [2u32, 5, 10] {
        let s = sorted(sample_sums(&p, n, 10_000_000, 77 + n as u64, Execution::Parallel));
        let mut sup: f64 = 0.0;
        for &q in &probs {
            let x = s[((q * s.len() as f64) as usize).min(s.len() - 1)];
            let exact = exact_cdf_a(x, &p, n).map_err(|e| e.to_string())?;
            sup = sup.max((exact - empirical_cdf(&s, x)).abs());
        }
        ok &= sup <= 5e-3;
        lines.push(format!("N={n} sup={sup:.2e}"));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn clt_crossover() -> Outcome {
    let p = FadingParams::modified(2.0, 2.5).unwrap();
    let mut sup = Vec::new();
    for n in [10u32, 50, 100] {
        let moments = clt_moments(&p, n).unwrap();
        let s = sorted(sample_sums(&p, n, 2_000_000, 900 + n as u64, Execution::Parallel));
        sup.push(ks_sorted(&s, |_, x| clt_cdf_a(x, &moments)));
    }
    let msg = format!("sup N=10 {:.4}, N=50 {:.4}, N=100 {:.4}", sup[0], sup[1], sup[2]);
    if sup[1] <= 0.02 && sup[2] <= 0.01 && sup[0] > sup[1] && sup[0] > sup[2] {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn bound_bracket() -> Outcome {
    let spec = QuadratureSpec::default().with_tolerances(1e-14, 1e-12);
    let mut gaps = Vec::new();
    for (m, m_s) in [(2.0, 2.5), (1.5, 1.5), (2.5, 2.5), (1.0, 1.5), (3.5, 10.0)] {
        for p in [
            FadingParams::modified(m, m_s).unwrap(),
            FadingParams::conventional(m, m_s, 1.0).unwrap(),
        ] {
            let mut worst_gap_8: f64 = 0.0;
            let e1 = integrate(|h| h * p.pdf(h), 0.0, f64::INFINITY, &spec).unwrap();
            let e2 = integrate(|h| h * h * p.pdf(h), 0.0, f64::INFINITY, &spec).unwrap();
            for n in 1..=20u32 {
                let lb = link(n, 53.0, 1000.0);
                let (lower, upper) = snr_expectation_bounds(&p, &lb).map_err(|e| e.to_string())?;
                let nf = n as f64;
                let exact = lb.gamma0() * (nf * e2 + nf * (nf - 1.0) * e1 * e1) / lb.path_loss;
                let slack = 1e-9 * exact;
                if lower > exact + slack || exact > upper + slack {
                    return Err(format!("ordering broken at ({m},{m_s}) N={n}: {lower} {exact} {upper}"));
                }
                if n >= 8 {
                    worst_gap_8 = worst_gap_8.max((exact - lower) / exact);
                }
            }
            gaps.push(((m, m_s), worst_gap_8));
        }
    }
    // The 5% closeness is judged at the default fading shape; the other
    // shapes are reported for reference.
    let default_gap = gaps
        .iter()
        .filter(|(s, _)| *s == (2.0, 2.5))
        .map(|(_, g)| *g)
        .fold(0.0, f64::max);
    let listed: Vec<String> = gaps.iter().step_by(2).map(|((m, s), g)| format!("({m},{s}) {g:.4}")).collect();
    let msg = format!(
        "ordering holds everywhere; max (exact-lower)/exact for N>=8 at (2,2.5) = {default_gap:.4}; other shapes: {}",
        listed.join(", ")
    );
    if default_gap <= 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn moment_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (m, m_s) in [(2.0, 2.5), (1.5, 1.5), (3.5, 10.0)] {
        let p = FadingParams::modified(m, m_s).unwrap();
        for n in 1..=20u32 {
            let a = expected_a_sq(&p, n, SecondMomentMethod::MgfDerivative).map_err(|e| e.to_string())?;
            let b = expected_a_sq(&p, n, SecondMomentMethod::MomentIdentity).map_err(|e| e.to_string())?;
            worst = worst.max(((a - b) / b).abs());
        }
    }
    let msg = format!("max relative difference {worst:.2e}");
    if worst <= 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Link budgets over two decades of γ₀ starting where the bound reaches one.
fn high_snr_sweep(p: &FadingParams, n: u32) -> Vec<LinkBudget> {
    let base = link(n, 0.0, 1000.0);
    let start = base.transmit_power * (ln_outage_upper_bound(p, &base).unwrap() / (n as f64 * p.m())).exp();
    (0..=20)
        .map(|k| base.with_transmit_power(start * 10f64.powf(k as f64 / 10.0)))
        .collect()
}

fn diversity_order() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, m) in [(3u32, 2.0), (5, 1.0), (10, 2.5)] {
        let p = FadingParams::modified(m, 2.5).unwrap();
        let sweep = high_snr_sweep(&p, n);
        let x: Vec<f64> = sweep.iter().map(|lb| lb.gamma0().log10()).collect();
        let y: Vec<f64> = sweep
            .iter()
            .map(|lb| ln_outage_upper_bound(&p, lb).unwrap() / std::f64::consts::LN_10)
            .collect();
        let slope = fitted_slope(&x, &y);
        let target = -(n as f64) * m;
        ok &= (slope - target).abs() <= 1e-6;
        lines.push(format!("(N={n},m={m}) slope {slope:.9}"));
    }
    // Gaussian curves for N = 30, 70, 150 stay under the bound at high SNR.
    let mut above = Vec::new();
    for (n, (m, m_s)) in [30u32, 70, 150]
        .into_iter()
        .flat_map(|n| [(2.5, 2.5), (1.5, 2.5), (2.5, 1.5)].map(|s| (n, s)))
    {
        let p = FadingParams::modified(m, m_s).unwrap();
        for lb in high_snr_sweep(&p, n) {
            let clt = outage_clt(&p, &lb).unwrap();
            let ub = ln_outage_upper_bound(&p, &lb).unwrap().exp();
            if clt > ub {
                above.push(format!("N={n},({m},{m_s}) at γ0={:.1} dB: clt {clt:.2e} > ub {ub:.2e}", 10.0 * lb.gamma0().log10()));
                break;
            }
        }
    }
    if above.is_empty() {
        lines.push("outage_clt below the bound on every high-SNR sweep".into());
    } else {
        ok = false;
        lines.extend(above);
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ratios_nondecreasing(out: &risfade::optimize::DinkelbachOutcome) -> bool {
    out.history.windows(2).all(|w| {
        w[0].regime != w[1].regime || w[1].ratio >= w[0].ratio * (1.0 - 1e-12)
    })
}

fn dinkelbach() -> Outcome {
    let cfg = DinkelbachConfig::default();
    let mut rng = RandomSource::new(5150);
    let mut lines = Vec::new();
    for k in 0..10 {
        let ps = 30.0 + 30.0 * rng.uniform();
        let z_c = 500.0 + 1500.0 * rng.uniform();
        let m = 1.2 + 1.8 * rng.uniform();
        let m_s = 1.2 + 1.8 * rng.uniform();
        let pr = 0.078 * (32.0f64 / 0.078).powf(rng.uniform());
        let p = FadingParams::modified(m, m_s).unwrap();
        let lb = link(1, ps, z_c);
        let pm = power_model(pr);
        let out = dinkelbach_optimal_n(&p, &lb, &pm, BANDWIDTH, &cfg).map_err(|e| e.to_string())?;
        let (n_o, _) = exhaustive_optimal_n(&p, &lb, &pm, BANDWIDTH, &cfg).map_err(|e| e.to_string())?;
        if out.n_star != n_o {
            return Err(format!("config {k}: algorithm {} vs exhaustive {n_o}", out.n_star));
        }
        if !ratios_nondecreasing(&out) {
            return Err(format!("config {k}: ratio sequence decreases"));
        }
        lines.push(out.n_star.to_string());
    }
    // Orderings at the listed phase powers, default transmit power and distance.
    let run = |m: f64, m_s: f64, pr: f64| {
        let p = FadingParams::modified(m, m_s).unwrap();
        dinkelbach_optimal_n(&p, &link(1, 53.0, 1000.0), &power_model(pr), BANDWIDTH, &cfg).unwrap()
    };
    let mut order = true;
    let mut detail = Vec::new();
    for pr in [0.078, 0.15] {
        let harsh = run(1.5, 1.5, pr);
        let mild = run(2.5, 2.5, pr);
        order &= harsh.n_star > mild.n_star && harsh.ee_star < mild.ee_star;
        detail.push(format!(
            "P_r={pr}: N* {} vs {}, EE* {:.4e} vs {:.4e}",
            harsh.n_star, mild.n_star, harsh.ee_star, mild.ee_star
        ));
    }
    let mut phase_ok = true;
    for (m, m_s) in [(1.5, 1.5), (2.5, 2.5), (2.0, 2.5)] {
        phase_ok &= run(m, m_s, 0.15).ee_star < run(m, m_s, 0.078).ee_star;
    }
    // For reference: a per-element cost high enough for an interior optimum.
    let (harsh, mild) = (run(1.5, 1.5, 32.0), run(2.5, 2.5, 32.0));
    let msg = format!(
        "10 random configs match exhaustive (N* = {}); fading order (1.5,1.5) vs (2.5,2.5): {}; EE* drops 0.078->0.15 W: {phase_ok}; at P_r=32 W: N* {} vs {}",
        lines.join(","),
        detail.join("; "),
        harsh.n_star,
        mild.n_star
    );
    if order && phase_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn coverage() -> Outcome {
    let p = FadingParams::modified(2.5, 2.5).unwrap();
    let configs = [
        (1000.0, 10.0),
        (1000.0, 20.0),
        (1000.0, 30.0),
        (1000.0, 40.0),
        (1000.0, 53.0),
        (2000.0, 20.0),
        (2000.0, 25.0),
        (2000.0, 30.0),
        (2000.0, 40.0),
        (2000.0, 53.0),
    ];
    let mut worst_gap: f64 = 0.0;
    let mut worst_kkt: f64 = 0.0;
    let mut worst_op: f64 = 0.0;
    let mut cases = Vec::new();
    for &(z_c, ps) in &configs {
        let lb = link(100, ps, z_c);
        let cfg = CoverageConfig {
            h_min: 100.0,
            h_max: 2000.0,
            op_threshold: 1e-4,
            theta_range: (0.1, 89.9),
            z_c,
            reading: ThresholdReading::SqrtK,
        };
        let s = coverage_maximize(&p, &lb, &plp(), &cfg).map_err(|e| e.to_string())?;
        let g = coverage_grid_oracle(&p, &lb, &plp(), &cfg, 500).map_err(|e| e.to_string())?;
        if s.case == ActiveCase::Infeasible || s.grid_derived {
            return Err(format!("z_c={z_c} P_s={ps}: no KKT solution ({:?})", s.case));
        }
        worst_gap = worst_gap.max((s.radius - g.radius).abs() / g.radius);
        let prob = CoverageProblem::new(&p, &lb, &plp(), &cfg).unwrap().unwrap();
        worst_kkt = worst_kkt.max(prob.kkt_residuals(s.radius, s.theta_deg, s.multipliers).max());
        cases.push(s.case);

        // Outage at the optimum geometry against the target.
        let geom = Geometry {
            altitude: s.altitude,
            z_c,
            radius: s.radius,
            theta_deg: s.theta_deg,
        };
        let at = LinkBudget::new(lb.transmit_power, lb.noise_power, 100, 10.0, composite_path_loss(&geom, &plp()).unwrap()).unwrap();
        let op = outage_clt(&p, &at).unwrap();
        worst_op = worst_op.max((op / cfg.op_threshold - 1.0).abs());
    }
    let low_ok = cases[0] == ActiveCase::AltitudeMin && cases[5] == ActiveCase::AltitudeMin;
    let high_ok = cases[4] == ActiveCase::Interior && cases[9] == ActiveCase::Interior;
    let msg = format!(
        "max radius gap {:.3}%, max KKT residual {worst_kkt:.1e}, max |OP/P_th - 1| {worst_op:.3}, cases {cases:?}",
        100.0 * worst_gap
    );
    if worst_gap <= 5e-3 && worst_kkt <= 1e-6 && worst_op <= 0.1 && low_ok && high_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn run_cli(args: &[&str], workers: usize, out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_risfade"))
        .args(args)
        .args(["--seed", "42", "--workers", &workers.to_string(), "--out"])
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("{args:?} exited with {status}"));
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 7] = [
        &["pdf-surface"],
        &["clt-check", "--trials", "100000"],
        &["snr-bounds"],
        &["capacity-sweep", "--trials", "10000"],
        &["outage-sweep", "--trials", "100000", "--ps-from", "10", "--ps-to", "14", "--ps-step", "2"],
        &["optimize-n", "--ps-from", "40", "--ps-to", "50", "--ps-step", "10"],
        &["optimize-coverage", "--ps-from", "10", "--ps-to", "50", "--ps-step", "20"],
    ];
    for args in commands {
        for format in ["csv", "json"] {
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--format", format]);
            let a = run_cli(&full, 1, &dir.path().join("a"))?;
            let b = run_cli(&full, 1, &dir.path().join("b"))?;
            let c = run_cli(&full, 8, &dir.path().join("c"))?;
            if a != b || a != c {
                return Err(format!("{} --format {format} differs", args[0]));
            }
        }
    }
    Ok("seven commands, csv and json, byte-identical across runs and 1 vs 8 workers".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("normalization", normalization),
        ("sampler fidelity", sampler_fidelity),
        ("exact CDF vs simulation", gil_pelaez_vs_mc),
        ("Gaussian approximation crossover", clt_crossover),
        ("mean SNR bracket", bound_bracket),
        ("second-moment routes agree", moment_identity),
        ("diversity order", diversity_order),
        ("element-count optimizer", dinkelbach),
        ("coverage KKT vs grid", coverage),
        ("CLI determinism", determinism),
    ];
    // ACCEPTANCE_ONLY=3,7 restricts the run to the listed criteria.
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name} ({:.1}s) {detail}", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
