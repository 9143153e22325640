//! Central differences with two levels of Richardson extrapolation
//! (steps h, h/2, h/4), error O(h⁶) for smooth functions.

/// Derivative of a fallible function; the first error from any stencil
/// point is returned.
pub fn try_differentiate_central<F, E>(mut f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut central = |step: f64| -> Result<f64, E> { Ok((f(x + step)? - f(x - step)?) / (2.0 * step)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let d4 = central(0.25 * h)?;
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

/// Richardson-extrapolated central difference `f'(x)` with base step `h`.
pub fn differentiate_central<F>(mut f: F, x: f64, h: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    try_differentiate_central::<_, std::convert::Infallible>(|t| Ok(f(t)), x, h)
        .unwrap_or_else(|e| match e {})
}
