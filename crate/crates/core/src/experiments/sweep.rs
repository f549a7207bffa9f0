use rayon::prelude::*;

use crate::diagnostics::l2_distance;
use crate::error::{Error, Result};
use crate::fit::fit_log_log;
use crate::scalar::Real;
use crate::solver_fd::{run, Grid1D, SolverConfig, TimeStep, Trajectory};

/// Prefixes an error message with the ε it came from.
pub(crate) fn annotate<T: Real>(err: Error, epsilon: Option<T>) -> Error {
    let tag = match epsilon {
        Some(e) => format!("epsilon = {e}: "),
        None => "unregularized: ".to_string(),
    };
    match err {
        Error::Config { key, message } => Error::Config {
            key,
            message: format!("{tag}{message}"),
        },
        Error::Domain(m) => Error::Domain(format!("{tag}{m}")),
        Error::Grid(m) => Error::Grid(format!("{tag}{m}")),
        Error::Fit(m) => Error::Fit(format!("{tag}{m}")),
        Error::Diagnostics(m) => Error::Diagnostics(format!("{tag}{m}")),
        other => other,
    }
}

/// Runs `base` once per ε in parallel, in input order.
pub fn run_family<T: Real>(base: &SolverConfig<T>, eps_list: &[Option<T>]) -> Result<Vec<Trajectory<T>>> {
    eps_list
        .par_iter()
        .map(|&eps| {
            let mut cfg = base.clone();
            cfg.epsilon = eps;
            run(&cfg).map_err(|e| annotate(e, eps))
        })
        .collect()
}

fn with_compare_time<T: Real>(base: &SolverConfig<T>, compare_time: T) -> Result<SolverConfig<T>> {
    if !(compare_time >= T::zero() && compare_time <= base.t_end) {
        return Err(Error::config(
            "experiment.compare_time",
            format!("must lie in [0, {}], got {compare_time}", base.t_end),
        ));
    }
    let mut cfg = base.clone();
    cfg.snapshot_times.push(compare_time);
    Ok(cfg)
}

fn u_at<T: Real>(traj: &Trajectory<T>, time: T) -> &[T] {
    &traj.snapshot_near(time).expect("snapshot at comparison time").fields.u
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow<T> {
    pub epsilon: T,
    pub epsilon_next: T,
    /// `‖u_ε − u_ε'‖_{L²}` at the comparison time.
    pub difference: T,
    /// `log(d_prev/d) / log(ε_prev/ε)`; absent on the first row or when undefined.
    pub observed_order: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable<T> {
    pub compare_time: T,
    pub rows: Vec<ConvergenceRow<T>>,
}

impl<T: Real> ConvergenceTable<T> {
    /// Differences strictly decrease, except that two consecutive differences
    /// both at or below `2 · floor` may stall.
    pub fn is_cauchy(&self, floor: T) -> bool {
        let cap = T::lit(2.0) * floor;
        self.rows.windows(2).all(|w| {
            w[1].difference < w[0].difference || (w[0].difference <= cap && w[1].difference <= cap)
        })
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.is_cauchy(T::zero()) && self.rows.windows(2).all(|w| w[1].difference < w[0].difference)
    }
}

pub struct SweepResult<T> {
    pub table: ConvergenceTable<T>,
    pub trajectories: Vec<Trajectory<T>>,
}

fn order<T: Real>(d_prev: T, d: T, e_prev: T, e: T) -> Option<T> {
    let ratio = (e_prev / e).ln();
    if d_prev > T::zero() && d > T::zero() && ratio != T::zero() {
        Some((d_prev / d).ln() / ratio)
    } else {
        None
    }
}

/// Consecutive-pair differences `‖u_{ε_i} − u_{ε_{i+1}}‖` at `compare_time`.
pub fn sweep_epsilon<T: Real>(base: &SolverConfig<T>, eps_list: &[T], compare_time: T) -> Result<SweepResult<T>> {
    if eps_list.len() < 3 {
        return Err(Error::config("experiment.epsilons", "need at least three values"));
    }
    if eps_list.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::config("experiment.epsilons", "values must be non-increasing"));
    }
    let cfg = with_compare_time(base, compare_time)?;
    let eps: Vec<Option<T>> = eps_list.iter().map(|e| Some(*e)).collect();
    let trajectories = run_family(&cfg, &eps)?;
    let grid = cfg.grid;
    let diffs: Vec<T> = trajectories
        .windows(2)
        .map(|w| l2_distance(u_at(&w[0], compare_time), u_at(&w[1], compare_time), &grid))
        .collect();
    let rows = (0..diffs.len())
        .map(|i| ConvergenceRow {
            epsilon: eps_list[i],
            epsilon_next: eps_list[i + 1],
            difference: diffs[i],
            observed_order: if i == 0 {
                None
            } else {
                order(diffs[i - 1], diffs[i], eps_list[i - 1], eps_list[i])
            },
        })
        .collect();
    Ok(SweepResult {
        table: ConvergenceTable { compare_time, rows },
        trajectories,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitTable<T> {
    pub compare_time: T,
    /// `(ε, ‖u_ε − u‖)` against the run with the unregularized coefficient.
    pub rows: Vec<(T, T)>,
    /// Log-log slope of the differences against ε.
    pub order: Option<T>,
}

/// Compares each `u_ε` with the solution for the raw coefficient, which must
/// be continuous for the comparison to mean anything.
pub fn limit_comparison<T: Real>(base: &SolverConfig<T>, eps_list: &[T], compare_time: T) -> Result<LimitTable<T>> {
    let cfg = with_compare_time(base, compare_time)?;
    let mut eps: Vec<Option<T>> = eps_list.iter().map(|e| Some(*e)).collect();
    eps.push(None);
    let runs = run_family(&cfg, &eps)?;
    let (limit, family) = runs.split_last().expect("at least the limit run");
    let reference = u_at(limit, compare_time);
    let rows: Vec<(T, T)> = family
        .iter()
        .zip(eps_list)
        .map(|(t, &e)| (e, l2_distance(u_at(t, compare_time), reference, &cfg.grid)))
        .collect();
    let (xs, ys): (Vec<T>, Vec<T>) = rows.iter().copied().unzip();
    let order = fit_log_log(&xs, &ys).ok().map(|f| f.slope);
    Ok(LimitTable {
        compare_time,
        rows,
        order,
    })
}

/// Same run at `(Δx, Δt)` and `(Δx/2, Δt/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementStudy<T> {
    pub compare_time: T,
    pub coarse_dx: T,
    /// `‖u_h − u_{h/2}‖` on the coarse nodes.
    pub difference: T,
    /// Richardson estimate `16/15 · difference` of the coarse error.
    pub estimated_error: T,
}

pub fn refinement_study<T: Real>(base: &SolverConfig<T>, compare_time: T) -> Result<RefinementStudy<T>> {
    let coarse = with_compare_time(base, compare_time)?;
    let mut fine = coarse.clone();
    fine.grid = coarse.grid.refined();
    fine.time_step = TimeStep::Fixed(coarse.dt() / T::lit(2.0));
    let runs: Vec<Result<Trajectory<T>>> = [&coarse, &fine].par_iter().map(|c| run(c)).collect();
    let mut runs = runs.into_iter();
    let a = runs.next().expect("coarse run")?;
    let b = runs.next().expect("fine run")?;
    let ua = u_at(&a, compare_time);
    let ub = restrict(u_at(&b, compare_time), &coarse.grid);
    let difference = l2_distance(ua, &ub, &coarse.grid);
    Ok(RefinementStudy {
        compare_time,
        coarse_dx: coarse.grid.dx(),
        difference,
        estimated_error: difference * T::lit(16.0 / 15.0),
    })
}

/// Coarse nodes are every other fine node for both grid kinds.
pub fn restrict<T: Real>(fine: &[T], coarse: &Grid1D<T>) -> Vec<T> {
    fine.iter().step_by(2).take(coarse.len()).copied().collect()
}
