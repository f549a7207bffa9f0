use rayon::prelude::*;

use crate::coefficient::BreakpointFunction;
use crate::diagnostics::{track_echo, EchoOptions, EchoReport};
use crate::error::Result;
use crate::scalar::Real;
use crate::solver_fd::{run, SolverConfig, Trajectory};

use super::presets::{paper_lorentzian, LORENTZIAN_RUNS};
use super::sweep::annotate;

pub struct EchoExperiment<T> {
    pub jump_time: Option<T>,
    pub report: Option<EchoReport<T>>,
    pub trajectory: Trajectory<T>,
}

/// First breakpoint with a jump, else the first breakpoint at all.
pub fn jump_time<T: Real>(b: &BreakpointFunction<T>) -> Option<T> {
    let bps = b.breakpoints();
    (0..bps.len())
        .find(|&i| b.jump(i) != T::zero())
        .or(if bps.is_empty() { None } else { Some(0) })
        .map(|i| bps[i])
}

/// Runs the configuration and looks for an echo after the coefficient jump.
pub fn echo_experiment<T: Real>(config: &SolverConfig<T>, options: &EchoOptions<T>) -> Result<EchoExperiment<T>> {
    let trajectory = run(config).map_err(|e| annotate(e, config.epsilon))?;
    let jump = jump_time(&config.coefficient);
    let report = match jump {
        Some(t) => track_echo(&trajectory, t, options)?,
        None => None,
    };
    Ok(EchoExperiment {
        jump_time: jump,
        report,
        trajectory,
    })
}

/// Echo experiments for every tabulated Lorentzian scale, in table order.
pub fn lorentzian_family<T: Real>(options: &EchoOptions<T>) -> Result<Vec<(T, EchoExperiment<T>)>> {
    LORENTZIAN_RUNS
        .par_iter()
        .map(|&(e, _, _)| {
            let scale = T::lit(e);
            echo_experiment(&paper_lorentzian(scale), options).map(|x| (scale, x))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::PulseSpec;
    use crate::solver_fd::Grid1D;

    #[test]
    fn jump_detection() {
        assert_eq!(jump_time(&BreakpointFunction::<f64>::paper()), Some(5.0));
        assert_eq!(jump_time(&BreakpointFunction::<f64>::constant(1.0)), None);
        let smooth = BreakpointFunction::<f64>::smooth_step(4.0, 6.0, 1.0, 2.0).unwrap();
        assert_eq!(jump_time(&smooth), Some(4.0));
    }

    #[test]
    fn coarse_paper_gaussian_has_left_moving_echo() {
        let grid = Grid1D::periodic(-15.0, 25.0, 2000).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::paper(), PulseSpec::paper_gaussian());
        cfg.epsilon = Some(0.01);
        cfg.t_end = 7.2;
        cfg.snapshot_times = crate::experiments::echo_snapshot_times();
        let exp = echo_experiment(&cfg, &EchoOptions::default()).unwrap();
        let report = exp.report.expect("echo");
        assert!(report.birth_time >= 5.2 && report.birth_time <= 6.0, "{report:?}");
        assert_eq!(report.echo_direction, -1.0);
        assert!(report.amplitude_ratio < 0.5);
    }
}
