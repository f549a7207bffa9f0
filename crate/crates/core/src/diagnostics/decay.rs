use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::scalar::Real;
use crate::solver_fd::DiagnosticSample;

/// Samples before this time are skipped by [`fit_decay_series`].
pub const DEFAULT_DECAY_START: f64 = 8.0;

/// Log-log decay fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit<T> {
    /// Slope of `log value` against `log t`.
    pub slope_t: T,
    pub intercept: T,
    /// Slope of `log value` against `log b(t)`; `None` when `b` is constant
    /// over the samples or was not supplied.
    pub slope_b: Option<T>,
}

/// Fits `log value` against `log t` and, if `b` is given, against `log b(t)`.
pub fn fit_decay<T: Real>(times: &[T], values: &[T], b: Option<&dyn Fn(T) -> T>) -> Result<DecayFit<T>> {
    if times.len() != values.len() {
        return Err(Error::Fit(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 samples, got {}", times.len())));
    }
    if let Some(bad) = times.iter().chain(values).find(|v| !(**v > T::zero())) {
        return Err(Error::Domain(format!("decay fit needs positive values, got {bad}")));
    }
    let log_v: Vec<T> = values.iter().map(|v| v.ln()).collect();
    let log_t: Vec<T> = times.iter().map(|t| t.ln()).collect();
    let LineFit { slope, intercept } = fit_line(&log_t, &log_v)?;
    let slope_b = match b {
        Some(b) => {
            let log_b = times
                .iter()
                .map(|&t| {
                    let v = b(t);
                    if v > T::zero() {
                        Ok(v.ln())
                    } else {
                        Err(Error::Domain(format!("b({t}) = {v} is not positive")))
                    }
                })
                .collect::<Result<Vec<T>>>()?;
            match fit_line(&log_b, &log_v) {
                Ok(fit) => Some(fit.slope),
                Err(Error::Fit(_)) => None,
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    Ok(DecayFit {
        slope_t: slope,
        intercept,
        slope_b,
    })
}

/// [`fit_decay`] on the L² series of a run, keeping samples with `t ≥ t_min`.
pub fn fit_decay_series<T: Real>(
    series: &[DiagnosticSample<T>],
    t_min: T,
    b: Option<&dyn Fn(T) -> T>,
) -> Result<DecayFit<T>> {
    let kept: Vec<&DiagnosticSample<T>> = series.iter().filter(|s| s.time >= t_min).collect();
    let times: Vec<T> = kept.iter().map(|s| s.time).collect();
    let values: Vec<T> = kept.iter().map(|s| s.l2_u).collect();
    fit_decay(&times, &values, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::BreakpointFunction;
    use proptest::prelude::*;

    fn times() -> Vec<f64> {
        (0..=50).map(|i| 10.0 + i as f64).collect()
    }

    #[test]
    fn inverse_time() {
        let t = times();
        let v: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        let fit = fit_decay(&t, &v, None).unwrap();
        assert!((fit.slope_t + 1.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-10);
        assert_eq!(fit.slope_b, None);
    }

    #[test]
    fn constant_values() {
        let t = times();
        let fit = fit_decay(&t, &vec![2.0; t.len()], None).unwrap();
        assert!(fit.slope_t.abs() < 1e-12);
    }

    #[test]
    fn inverse_paper_coefficient() {
        let b = BreakpointFunction::<f64>::paper();
        let eval = |t: f64| b.eval_extended(t);
        let t = times();
        let v: Vec<f64> = t.iter().map(|&t| 3.0 / eval(t)).collect();
        let fit = fit_decay(&t, &v, Some(&eval)).unwrap();
        assert!((fit.slope_b.unwrap() + 1.0).abs() < 1e-6);
        let one = |_: f64| 1.0;
        assert_eq!(fit_decay(&t, &v, Some(&one)).unwrap().slope_b, None);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_decay(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 1.0, 1.0], None), Err(Error::Domain(_))));
        assert!(matches!(fit_decay(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], None), Err(Error::Fit(_))));
    }

    #[test]
    fn series_skips_early_samples() {
        let series: Vec<DiagnosticSample<f64>> = (1..=60)
            .map(|i| {
                let t = i as f64;
                DiagnosticSample {
                    time: t,
                    l2_u: if t < 8.0 { 1.0 } else { t.powf(-0.5) },
                    sup_u: 0.0,
                    energy: 0.0,
                }
            })
            .collect();
        let fit = fit_decay_series(&series, DEFAULT_DECAY_START, None).unwrap();
        assert!((fit.slope_t + 0.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn scaling_invariance(scale in 1e-3f64..1e3) {
            let t = times();
            let v: Vec<f64> = t.iter().map(|t| t.powf(-0.7) * (1.0 + 0.1 * t.sin())).collect();
            let w: Vec<f64> = v.iter().map(|v| v * scale).collect();
            let a = fit_decay(&t, &v, None).unwrap();
            let b = fit_decay(&t, &w, None).unwrap();
            prop_assert!((a.slope_t - b.slope_t).abs() < 1e-10);
            prop_assert!((b.intercept - a.intercept - scale.ln()).abs() < 1e-9);
        }
    }
}
