//! Seeded simulation of the envelope sum and SNR.
//!
//! Trials are split into fixed-size chunks; chunk `k` draws from stream `k` of
//! the run seed, and chunk results are merged in index order by a pairwise
//! tree. The output therefore depends only on `(seed, trials)`, never on the
//! number of worker threads or on [`Execution`].

use serde::{Deserialize, Serialize};

use crate::aggregate::LinkBudget;
use crate::channel::{EnvelopeSampler, FadingParams};
use crate::error::{Error, Result};
use crate::numerics::RandomSource;

/// Trials per independently seeded chunk.
pub const CHUNK_TRIALS: u64 = 65_536;

/// Smallest trial count accepted by the distribution and moment estimators.
pub const MIN_TRIALS: u64 = 100_000;

/// Minimum number of observed events for an outage estimate to be trusted.
pub const MIN_EVENTS: u64 = 100;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled and runs
    /// sequentially otherwise.
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimate: f64,
    pub half_width_95: f64,
    pub trials: u64,
    pub seed: u64,
    /// Set when too few events were observed for the interval to be reliable.
    pub low_confidence: bool,
}

/// Mergeable running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        Self {
            count,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * w,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    fn report(&self, seed: u64) -> McReport {
        McReport {
            estimate: self.mean,
            half_width_95: Z95 * (self.sample_variance() / self.count as f64).sqrt(),
            trials: self.count,
            seed,
            low_confidence: false,
        }
    }
}

/// Runs `work(chunk_trials, rng)` once per chunk and returns the results in
/// chunk order.
pub fn run_chunks<T, F>(trials: u64, seed: u64, exec: Execution, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut RandomSource) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let job = |k: u64| {
        let size = CHUNK_TRIALS.min(trials - k * CHUNK_TRIALS);
        let mut rng = RandomSource::with_stream(seed, k);
        work(size, &mut rng)
    };
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..chunks).into_par_iter().map(job).collect()
        }
        _ => (0..chunks).map(job).collect(),
    }
}

/// Fixed-shape binary tree reduction.
pub fn reduce_pairwise<T: Clone, F: Fn(T, T) -> T>(mut items: Vec<T>, identity: T, merge: F) -> T {
    if items.is_empty() {
        return identity;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut iter = items.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap_or(identity)
}

fn check_trials(trials: u64, minimum: u64) -> Result<()> {
    if trials < minimum {
        return Err(Error::domain(format!(
            "at least {minimum} trials are required, got {trials}"
        )));
    }
    Ok(())
}

fn draw_sum(sampler: &EnvelopeSampler, n: u32, rng: &mut RandomSource) -> f64 {
    (0..n).map(|_| sampler.sample(rng).value()).sum()
}

/// Raw draws of `A` in trial order (deterministic for a seed).
pub fn sample_sums(p: &FadingParams, n: u32, trials: u64, seed: u64, exec: Execution) -> Vec<f64> {
    let sampler = p.sampler();
    run_chunks(trials, seed, exec, |size, rng| {
        (0..size).map(|_| draw_sum(&sampler, n, rng)).collect::<Vec<_>>()
    })
    .concat()
}

fn proportion(hits: u64, trials: u64, seed: u64) -> McReport {
    let q = hits as f64 / trials as f64;
    McReport {
        estimate: q,
        half_width_95: Z95 * (q * (1.0 - q) / trials as f64).sqrt(),
        trials,
        seed,
        low_confidence: false,
    }
}

/// Empirical CDF of `A` at each grid point, with binomial 95% half-widths.
pub fn mc_cdf_a(
    grid: &[f64],
    p: &FadingParams,
    n: u32,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<McReport>> {
    check_trials(trials, MIN_TRIALS)?;
    if n == 0 {
        return Err(Error::domain("element count must be at least 1"));
    }
    if grid.iter().any(|t| t.is_nan()) {
        return Err(Error::domain("CDF grid contains NaN"));
    }
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| grid[i]).collect();
    let sampler = p.sampler();
    let bins = run_chunks(trials, seed, exec, |size, rng| {
        // bins[j] counts draws with sorted[j-1] < A <= sorted[j]
        let mut bins = vec![0u64; sorted.len() + 1];
        for _ in 0..size {
            let a = draw_sum(&sampler, n, rng);
            bins[sorted.partition_point(|&t| t < a)] += 1;
        }
        bins
    });
    let total = reduce_pairwise(bins, vec![0u64; sorted.len() + 1], |mut a, b| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    });
    let mut out = vec![proportion(0, trials, seed); grid.len()];
    let mut cumulative = 0u64;
    for (j, &i) in order.iter().enumerate() {
        cumulative += total[j];
        out[i] = proportion(cumulative, trials, seed);
    }
    Ok(out)
}

/// Fraction of trials with `γ < γ_th`.
pub fn mc_outage(
    p: &FadingParams,
    lb: &LinkBudget,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<McReport> {
    lb.validate()?;
    check_trials(trials, 1)?;
    let threshold = lb.amplitude_threshold();
    let sampler = p.sampler();
    let counts = run_chunks(trials, seed, exec, |size, rng| {
        (0..size)
            .filter(|_| draw_sum(&sampler, lb.elements, rng) < threshold)
            .count() as u64
    });
    let hits = reduce_pairwise(counts, 0, |a, b| a + b);
    let mut report = proportion(hits, trials, seed);
    report.low_confidence = hits < MIN_EVENTS;
    Ok(report)
}

/// Sample mean of `γ` and of `γ²`.
pub fn mc_snr_moments(
    p: &FadingParams,
    lb: &LinkBudget,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<(McReport, McReport)> {
    lb.validate()?;
    check_trials(trials, MIN_TRIALS)?;
    let scale = lb.gamma0() / lb.path_loss;
    let sampler = p.sampler();
    let parts = run_chunks(trials, seed, exec, |size, rng| {
        let mut first = RunningMoments::default();
        let mut second = RunningMoments::default();
        for _ in 0..size {
            let a = draw_sum(&sampler, lb.elements, rng);
            let g = scale * a * a;
            first.push(g);
            second.push(g * g);
        }
        (first, second)
    });
    let (first, second) = reduce_pairwise(
        parts,
        (RunningMoments::default(), RunningMoments::default()),
        |a, b| (a.0.merge(b.0), a.1.merge(b.1)),
    );
    Ok((first.report(seed), second.report(seed)))
}

/// Sample mean of `bandwidth · log₂(1 + γ)`.
pub fn mc_capacity(
    p: &FadingParams,
    lb: &LinkBudget,
    bandwidth: f64,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<McReport> {
    lb.validate()?;
    check_trials(trials, 2)?;
    let scale = lb.gamma0() / lb.path_loss;
    let sampler = p.sampler();
    let parts = run_chunks(trials, seed, exec, |size, rng| {
        let mut acc = RunningMoments::default();
        for _ in 0..size {
            let a = draw_sum(&sampler, lb.elements, rng);
            acc.push(bandwidth * (scale * a * a).ln_1p() / std::f64::consts::LN_2);
        }
        acc
    });
    Ok(reduce_pairwise(parts, RunningMoments::default(), RunningMoments::merge).report(seed))
}
