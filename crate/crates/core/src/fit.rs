//! Ordinary least-squares fits of power laws in log-log coordinates.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Result of fitting `log y = intercept + slope * log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

/// Unweighted least-squares fit over all points.
pub fn fit_power_law<T: Scalar>(x: &[T], y: &[T]) -> Result<PowerLawFit<T>> {
    if x.len() != y.len() {
        return Err(Error::InvalidSweep(format!(
            "{} abscissae but {} ordinates",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.len(),
        });
    }
    if let Some(v) = x
        .iter()
        .chain(y)
        .find(|v| !(**v > T::zero()) || !v.is_finite())
    {
        return Err(Error::InvalidSweep(format!(
            "log-log fit needs positive finite data, got {v}"
        )));
    }
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let n = T::from_count(lx.len());
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxx: T = lx.iter().map(|&a| (a - mx) * (a - mx)).sum();
    let sxy: T = lx.iter().zip(&ly).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let syy: T = ly.iter().map(|&b| (b - my) * (b - my)).sum();
    if sxx == T::zero() {
        return Err(Error::InvalidSweep("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == T::zero() {
        T::one()
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(PowerLawFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    fit_power_law(x, y).map(|f| f.slope)
}
