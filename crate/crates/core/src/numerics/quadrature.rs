//! Adaptive Gauss-Kronrod quadrature on finite and half-infinite ranges, plus
//! a partitioned integrator for slowly decaying oscillatory integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Tolerances and limits for [`integrate`] and [`integrate_oscillatory`].
///
/// `truncation_point` is the length of the leading stretch `[a, a + L]` of a
/// half-infinite range that is integrated directly; the remainder is mapped
/// onto a finite interval through `x = a + L / u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub truncation_point: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            truncation_point: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
        truncation_point: f64,
    ) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
            truncation_point,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        if !(self.truncation_point > 0.0 && self.truncation_point.is_finite()) {
            return Err(Error::domain("truncation_point must be positive and finite"));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_truncation_point(mut self, truncation_point: f64) -> Self {
        self.truncation_point = truncation_point;
        self
    }

    fn tolerance_for(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

// Kronrod abscissae and weights, 15-point rule embedding 7-point Gauss.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    result: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(centre);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = half * XGK[jtw];
        let f1 = f(centre - absc);
        let f2 = f(centre + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let sum = f1 + f2;
        res_g += WG[j] * sum;
        res_k += WGK[jtw] * sum;
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = half * XGK[jtwm1];
        let f1 = f(centre - absc);
        let f2 = f(centre + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    if !res_k.is_finite() {
        return Err(Error::domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, result, error })
}

/// Globally adaptive bisection driven by the largest local error estimate.
fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    let first = gauss_kronrod_15(f, a, b)?;
    let mut total = first.result;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    heap.push(first);
    let mut segments = 1usize;

    while error > spec.tolerance_for(total) {
        if segments >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                message: format!(
                    "adaptive quadrature on [{a}, {b}] hit {} subdivisions",
                    spec.max_subdivisions
                ),
                estimate: total,
                error,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Accuracy {
                message: "quadrature limited by round-off".into(),
                estimate: total,
                error,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
        {
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod_15(f, worst.a, mid)?;
        let right = gauss_kronrod_15(f, mid, worst.b)?;
        total += left.result + right.result - worst.result;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        segments += 1;
    }

    // Re-sum to shed the drift of the running updates.
    let mut sum = 0.0;
    let mut comp = 0.0;
    for s in heap.iter().chain(frozen.iter()) {
        let y = s.result - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

/// Integrates `f` over `[lower, upper]`; `upper` may be `f64::INFINITY`.
///
/// Integrable endpoint singularities are fine since the rule never evaluates
/// the endpoints. Failure to meet the tolerance within the subdivision budget
/// yields [`Error::Accuracy`] carrying the partial estimate.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if lower.is_nan() || upper.is_nan() || !lower.is_finite() {
        return Err(Error::domain("integration limits must be a finite lower bound and a real or +inf upper bound"));
    }
    if upper == lower {
        return Ok(0.0);
    }
    if upper.is_finite() {
        if upper < lower {
            return Ok(-adaptive(&f, upper, lower, spec)?);
        }
        return adaptive(&f, lower, upper, spec);
    }
    if upper == f64::NEG_INFINITY {
        return Err(Error::domain("lower infinite limits are not supported"));
    }
    let len = spec.truncation_point;
    // t in [0, 1]: x = lower + len t; t in (1, 2): u = 2 - t, x = lower + len / u.
    let mapped = |t: f64| {
        if t <= 1.0 {
            len * f(lower + len * t)
        } else {
            let u = 2.0 - t;
            if u <= 0.0 {
                return 0.0;
            }
            let x = lower + len / u;
            if !x.is_finite() {
                return 0.0;
            }
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * len / (u * u)
            }
        }
    };
    adaptive(&mapped, 0.0, 2.0, spec)
}

/// Oscillatory weight multiplying the envelope in [`integrate_oscillatory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Sin,
    Cos,
}

impl Kernel {
    fn eval(self, x: f64) -> f64 {
        match self {
            Kernel::Sin => x.sin(),
            Kernel::Cos => x.cos(),
        }
    }
}

/// `∫₀^∞ envelope(x) · kernel(frequency · x) dx` for envelopes that decay as
/// `x → ∞`, possibly only algebraically.
///
/// The half-line is cut at the zeros of the kernel and the resulting
/// alternating series of half-period contributions is summed with Euler
/// (repeated averaging) acceleration. At zero frequency the cosine case
/// reduces to [`integrate`] and the sine case to zero.
pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
    envelope: F,
    frequency: f64,
    kernel: Kernel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !frequency.is_finite() {
        return Err(Error::domain("oscillation frequency must be finite"));
    }
    if frequency < 0.0 {
        let value = integrate_oscillatory(envelope, -frequency, kernel, spec)?;
        return Ok(match kernel {
            Kernel::Sin => -value,
            Kernel::Cos => value,
        });
    }
    if frequency == 0.0 {
        return match kernel {
            Kernel::Sin => Ok(0.0),
            Kernel::Cos => integrate(envelope, 0.0, f64::INFINITY, spec),
        };
    }
    let half_period = PI / frequency;
    let first_zero = match kernel {
        Kernel::Sin => half_period,
        Kernel::Cos => 0.5 * half_period,
    };
    integrate_partitioned(
        |x| envelope(x) * kernel.eval(frequency * x),
        0.0,
        first_zero,
        half_period,
        spec,
    )
}

const EULER_DEPTH: usize = 12;
const MIN_PIECES: usize = 6;

/// Euler transform of the tail of a sequence of partial sums by repeated
/// averaging of neighbours.
fn euler_estimate(partial: &[f64]) -> f64 {
    let k = (partial.len() - 1).min(EULER_DEPTH);
    let mut work: Vec<f64> = partial[partial.len() - k - 1..].to_vec();
    for level in 0..k {
        for i in 0..(k - level) {
            work[i] = 0.5 * (work[i] + work[i + 1]);
        }
    }
    work[0]
}

/// Integrates `f` over `[start, ∞)` piecewise: first over `[start,
/// first_break]`, then over consecutive intervals of length `half_period`.
///
/// Intended for integrands whose sign flips roughly once per `half_period`;
/// the piece sums are accelerated with [`euler_estimate`]. A sequence of
/// pieces that fails to decay is reported as a divergent tail.
pub fn integrate_partitioned<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    first_break: f64,
    half_period: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !(half_period > 0.0 && half_period.is_finite()) || !(first_break > start) {
        return Err(Error::domain("partition requires first_break > start and half_period > 0"));
    }
    let piece_spec = QuadratureSpec {
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };
    let mut terms: Vec<f64> = Vec::new();
    let mut partial: Vec<f64> = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut lo = start;
    let mut hi = first_break;

    for n in 0..spec.max_subdivisions.max(MIN_PIECES + 2) {
        let term = integrate(&f, lo, hi, &piece_spec)?;
        terms.push(term);
        sum += term;
        partial.push(sum);
        estimates.push(euler_estimate(&partial));
        lo = hi;
        hi = first_break + (n + 1) as f64 * half_period;

        if n + 1 < MIN_PIECES {
            continue;
        }
        let e = &estimates[estimates.len() - 3..];
        let tol = spec.tolerance_for(e[2]);
        let settled = (e[2] - e[1]).abs() <= tol && (e[1] - e[0]).abs() <= tol;
        // The magnitude of the latest piece must be shrinking against the
        // pieces near the middle of the run; otherwise the averaging would
        // assign a value to a divergent series.
        let mid = terms.len() / 2;
        let reference = terms[mid.saturating_sub(1)..=mid]
            .iter()
            .fold(0.0f64, |acc, t| acc.max(t.abs()));
        let last = term.abs();
        let decaying = last <= tol || last <= 0.9 * reference;
        if settled && decaying {
            return Ok(e[2]);
        }
    }
    let last = *estimates.last().unwrap_or(&sum);
    Err(Error::Accuracy {
        message: "oscillatory tail did not converge (divergent or too slowly decaying envelope)"
            .into(),
        estimate: last,
        error: terms.last().map_or(f64::INFINITY, |t| t.abs()),
    })
}
