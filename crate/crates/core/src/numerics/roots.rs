//! Brent's method for bracketed scalar roots and damped Newton for small
//! nonlinear systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum RootStart {
    /// Interval `[lo, hi]` over which a scalar function changes sign.
    Bracket(f64, f64),
    /// Initial point, one coordinate per unknown.
    Point(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSpec {
    pub start: RootStart,
    /// Upper bound on the residual norm accepted as a root.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl RootSpec {
    pub fn bracket(lo: f64, hi: f64) -> Self {
        Self {
            start: RootStart::Bracket(lo, hi),
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }

    pub fn point(start: Vec<f64>) -> Self {
        Self {
            start: RootStart::Point(start),
            tolerance: 1e-10,
            max_iterations: 100,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("root tolerance must be positive"));
        }
        if let RootStart::Bracket(lo, hi) = self.start {
            if !(lo < hi) {
                return Err(Error::domain("bracket endpoints must satisfy lo < hi"));
            }
        }
        Ok(())
    }
}

/// Scalar root. A bracket runs Brent's method; a one-element start point runs
/// the damped Newton solver of [`find_root_system`].
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, spec: &RootSpec) -> Result<f64> {
    spec.validate()?;
    let (lo, hi) = match &spec.start {
        RootStart::Bracket(lo, hi) => (*lo, *hi),
        RootStart::Point(p) => {
            if p.len() != 1 {
                return Err(Error::domain("scalar root needs exactly one start coordinate"));
            }
            let x = find_root_system(|v| vec![f(v[0])], spec)?;
            return Ok(x[0]);
        }
    };
    let root = brent(&mut f, lo, hi, spec)?;
    debug_assert!(f(root).abs() <= spec.tolerance);
    Ok(root)
}

fn brent<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64, spec: &RootSpec) -> Result<f64> {
    let tol = spec.tolerance;
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::domain("function is NaN at a bracket endpoint"));
    }
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::convergence(
            format!("no sign change on [{lo}, {hi}]"),
            None,
        ));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..spec.max_iterations {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        if fb.abs() <= tol {
            return Ok(b);
        }
        let step_tol = 2.0 * f64::EPSILON * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= step_tol {
            break;
        }
        if e.abs() >= step_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (step_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > step_tol {
            d
        } else {
            step_tol.copysign(m)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::convergence("function returned NaN inside bracket", Some(b)));
        }
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    Err(Error::convergence(
        format!("residual {:e} above tolerance {tol:e}", fb.abs()),
        Some(b),
    ))
}

fn norm(v: &[f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n.is_nan() {
        f64::INFINITY
    } else {
        n
    }
}

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if !(a[pivot][col].abs() > 1e-300) || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Root of a square system `F(x) = 0` from a start point, by Newton steps with
/// a central-difference Jacobian and halving line search on `‖F‖`.
///
/// Non-finite components of `F` are treated as an infinitely large residual,
/// which lets callers signal leaving the admissible region with `NaN`.
pub fn find_root_system<F: FnMut(&[f64]) -> Vec<f64>>(mut f: F, spec: &RootSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut x = match &spec.start {
        RootStart::Point(p) if !p.is_empty() => p.clone(),
        RootStart::Point(_) => return Err(Error::domain("empty start point")),
        RootStart::Bracket(lo, hi) => vec![0.5 * (lo + hi)],
    };
    let n = x.len();
    let mut fx = f(&x);
    if fx.len() != n {
        return Err(Error::domain("system must have as many equations as unknowns"));
    }
    let mut res = norm(&fx);
    if !res.is_finite() {
        return Err(Error::domain("system is not finite at the start point"));
    }

    for _ in 0..spec.max_iterations {
        if res <= spec.tolerance {
            return Ok(x);
        }
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = f(&xp);
            let fm = f(&xm);
            for i in 0..n {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs: Vec<f64> = fx.iter().map(|v| -v).collect();
        let Some(dx) = solve_linear(jac, rhs) else {
            return Err(Error::convergence("singular Jacobian", Some(res)));
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-10 {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + lambda * d).collect();
            let ft = f(&trial);
            let rt = norm(&ft);
            if rt < (1.0 - 1e-4 * lambda) * res || rt <= spec.tolerance {
                x = trial;
                fx = ft;
                res = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            if res <= spec.tolerance {
                return Ok(x);
            }
            return Err(Error::convergence("line search stalled", Some(res)));
        }
    }
    if res <= spec.tolerance {
        return Ok(x);
    }
    Err(Error::convergence(
        format!("no root within {} iterations", spec.max_iterations),
        Some(res),
    ))
}
