use std::convert::Infallible;

/// Default step for [`derivative2`]: `1e-3 · (|x| + 1)`.
pub fn default_step(x: f64) -> f64 {
    1e-3 * (x.abs() + 1.0)
}

/// Five-point central second derivative, `O(step⁴)`.
pub fn derivative2<F: FnMut(f64) -> f64>(mut f: F, x: f64, step: f64) -> f64 {
    match try_derivative2(|t| Ok::<_, Infallible>(f(t)), x, step) {
        Ok(v) => v,
        Err(never) => match never {},
    }
}

/// [`derivative2`] for fallible functions; the first error is returned.
pub fn try_derivative2<F, E>(mut f: F, x: f64, step: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let f2p = f(x + 2.0 * step)?;
    let f1p = f(x + step)?;
    let f0 = f(x)?;
    let f1m = f(x - step)?;
    let f2m = f(x - 2.0 * step)?;
    Ok((-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * step * step))
}
