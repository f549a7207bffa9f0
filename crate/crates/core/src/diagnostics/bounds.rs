use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver_fd::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRow<T> {
    pub epsilon: Option<T>,
    /// `max_t ‖u(t)‖_{L²}` over the recorded series.
    pub max_l2: T,
}

/// Spread of `max_t ‖u_ε(t)‖` across a family of runs.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundSummary<T> {
    pub rows: Vec<BoundRow<T>>,
    /// `(max − min) / min` over the rows.
    pub spread: T,
}

pub fn uniform_bound_summary<T: Real>(trajectories: &[&Trajectory<T>]) -> Result<BoundSummary<T>> {
    if trajectories.len() < 2 {
        return Err(Error::Domain(format!(
            "need at least two trajectories, got {}",
            trajectories.len()
        )));
    }
    let first = &trajectories[0].info;
    if let Some(bad) = trajectories.iter().find(|t| !t.info.same_setup_except_epsilon(first)) {
        return Err(Error::Domain(format!(
            "trajectory with epsilon {:?} differs from the first in more than epsilon",
            bad.info.epsilon
        )));
    }
    let rows = trajectories
        .iter()
        .map(|t| {
            if t.series.is_empty() {
                return Err(Error::Diagnostics("trajectory has no diagnostic samples".into()));
            }
            Ok(BoundRow {
                epsilon: t.info.epsilon,
                max_l2: t.series.iter().fold(T::zero(), |m, s| m.max(s.l2_u)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lo = rows.iter().fold(T::infinity(), |m, r| m.min(r.max_l2));
    let hi = rows.iter().fold(T::zero(), |m, r| m.max(r.max_l2));
    if !(lo > T::zero()) {
        return Err(Error::Diagnostics("a trajectory has zero L² norm throughout".into()));
    }
    Ok(BoundSummary {
        rows,
        spread: (hi - lo) / lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::BreakpointFunction;
    use crate::initial_data::PulseSpec;
    use crate::solver_fd::{run, Grid1D, SolverConfig};

    fn traj(eps: f64, t_end: f64) -> Trajectory<f64> {
        let grid = Grid1D::periodic(-15.0, 25.0, 800).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::paper(), PulseSpec::paper_gaussian());
        cfg.epsilon = Some(eps);
        cfg.t_end = t_end;
        run(&cfg).unwrap()
    }

    #[test]
    fn duplicates_have_zero_spread() {
        let a = traj(0.5, 1.0);
        let s = uniform_bound_summary(&[&a, &a]).unwrap();
        assert_eq!(s.spread, 0.0);
        assert_eq!(s.rows.len(), 2);
    }

    #[test]
    fn preconditions() {
        let a = traj(0.5, 1.0);
        assert!(matches!(uniform_bound_summary(&[&a]), Err(Error::Domain(_))));
        let b = traj(0.25, 2.0);
        assert!(matches!(uniform_bound_summary(&[&a, &b]), Err(Error::Domain(_))));
        let c = traj(0.25, 1.0);
        assert!(uniform_bound_summary(&[&a, &c]).is_ok());
    }
}
