use crate::diagnostics::{fit_decay_series, DecayFit, DEFAULT_DECAY_START};
use crate::error::{Error, Result};
use crate::mollifier::TimeCoefficient;
use crate::scalar::Real;
use crate::solver_fd::{SolverConfig, Trajectory};

use super::sweep::run_family;

/// Decay of one run over a time window.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayStudy<T> {
    pub epsilon: Option<T>,
    pub window: (T, T),
    /// Fit of `‖u(t)‖` over `t ≥ 8`.
    pub fit: DecayFit<T>,
    /// `(t, ‖u‖, b_ε(t), ‖u‖·b_ε(t))` inside the window.
    pub ratio_series: Vec<(T, T, T, T)>,
    /// `max/min` of `‖u‖·b_ε` inside the window.
    pub ratio_spread: T,
    pub l2_start: T,
    pub l2_end: T,
    /// Smallest and largest `t·b'_ε/b_ε` on the samples inside the window.
    pub dissipation_scaling: (T, T),
}

/// Fits and ratio series of a finished run.
pub fn decay_study<T: Real, C: TimeCoefficient<T> + ?Sized>(
    trajectory: &Trajectory<T>,
    coeff: &C,
    window: (T, T),
) -> Result<DecayStudy<T>> {
    let b = |t: T| coeff.value(t);
    let fit = fit_decay_series(&trajectory.series, T::lit(DEFAULT_DECAY_START), Some(&b))?;
    let inside: Vec<_> = trajectory
        .series
        .iter()
        .filter(|s| s.time >= window.0 && s.time <= window.1)
        .collect();
    if inside.len() < 2 {
        return Err(Error::Diagnostics(format!(
            "fewer than two samples in [{}, {}]",
            window.0, window.1
        )));
    }
    let ratio_series: Vec<(T, T, T, T)> = inside
        .iter()
        .map(|s| {
            let bt = coeff.value(s.time);
            (s.time, s.l2_u, bt, s.l2_u * bt)
        })
        .collect();
    let (lo, hi) = ratio_series
        .iter()
        .fold((T::infinity(), T::zero()), |(lo, hi), r| (lo.min(r.3), hi.max(r.3)));
    let scaling: Vec<T> = inside
        .iter()
        .map(|s| s.time * coeff.derivative(s.time) / coeff.value(s.time))
        .collect();
    let dissipation_scaling = scaling
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    Ok(DecayStudy {
        epsilon: trajectory.info.epsilon,
        window,
        fit,
        ratio_spread: hi / lo,
        l2_start: inside[0].l2_u,
        l2_end: inside[inside.len() - 1].l2_u,
        ratio_series,
        dissipation_scaling,
    })
}

/// One run per ε up to `base.t_end`, each reduced to a [`DecayStudy`] over
/// `[window_start, t_end]`.
pub fn decay_experiment<T: Real>(
    base: &SolverConfig<T>,
    eps_list: &[Option<T>],
    window_start: T,
) -> Result<Vec<DecayStudy<T>>> {
    let runs = run_family(base, eps_list)?;
    runs.iter()
        .zip(eps_list)
        .map(|(traj, &eps)| {
            let mut cfg = base.clone();
            cfg.epsilon = eps;
            let coeff = cfg.coefficient_model()?;
            decay_study(traj, &coeff, (window_start, base.t_end))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::BreakpointFunction;
    use crate::initial_data::PulseSpec;
    use crate::solver_fd::{DiagnosticSample, Grid1D};

    #[test]
    fn constant_coefficient_does_not_decay() {
        let grid = Grid1D::<f64>::periodic(-30.0, 30.0, 1500).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::constant(1.0), PulseSpec::paper_gaussian());
        cfg.t_end = 20.0;
        cfg.diag_every = 50;
        let studies = decay_experiment(&cfg, &[None], 10.0).unwrap();
        let s = &studies[0];
        assert!(s.fit.slope_t.abs() < 1e-3, "{:?}", s.fit);
        assert_eq!(s.fit.slope_b, None);
        assert_eq!(s.dissipation_scaling, (0.0, 0.0));
    }

    #[test]
    fn constructed_inverse_coefficient_norms() {
        let b = BreakpointFunction::<f64>::paper();
        let grid = Grid1D::periodic(-1.0, 1.0, 16).unwrap();
        let cfg = SolverConfig::new(grid, b.clone(), PulseSpec::paper_gaussian());
        let mut traj = crate::solver_fd::run(&cfg).unwrap();
        traj.series = (10..=60)
            .map(|t| {
                let t = t as f64;
                DiagnosticSample {
                    time: t,
                    l2_u: 2.0 / b.eval_extended(t),
                    sup_u: 0.0,
                    energy: 0.0,
                }
            })
            .collect();
        let study = decay_study(&traj, &b, (10.0, 60.0)).unwrap();
        assert!((study.fit.slope_b.unwrap() + 1.0).abs() < 1e-9);
        assert!((study.ratio_spread - 1.0).abs() < 1e-12);
        let (lo, hi) = study.dissipation_scaling;
        assert!((lo - 0.4).abs() < 1e-12 && (hi - 0.8).abs() < 1e-12);
    }
}
