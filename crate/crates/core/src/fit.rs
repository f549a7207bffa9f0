//! Ordinary least squares for straight-line fits.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Slope and intercept of a fitted line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
}

/// Least-squares line through `(x, y)` pairs. Needs at least two distinct x.
pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!(
            "length mismatch: {} abscissae, {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    let n = T::from_usize_lossy(xs.len());
    if xs.len() < 2 {
        return Err(Error::Fit("need at least two samples".into()));
    }
    let mean_x = xs.iter().copied().sum::<T>() / n;
    let mean_y = ys.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mean_x) * (x - mean_x);
        sxy = sxy + (x - mean_x) * (y - mean_y);
    }
    if sxx <= T::zero() {
        return Err(Error::Fit("abscissae are not distinct".into()));
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}

/// Fits `log y = slope * log x + intercept`. All inputs must be positive.
pub fn fit_log_log<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > T::zero())) {
        return Err(Error::Domain(format!(
            "log-log fit needs positive values, got {bad}"
        )));
    }
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly)
}
