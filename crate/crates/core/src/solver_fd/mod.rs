//! Physical-space solver for `p_t = −b_ε u_x`, `u_t = −(1/b_ε) p_x`.
//!
//! Eliminating `p` gives `u_tt − u_xx + (b'_ε/b_ε) u_t = 0`, so the second
//! component is the solution of the regularized dissipative wave equation.
//! Space is discretized with the fourth-order centered stencil and time with
//! classical RK4, sampling `b_ε` at every stage time.

mod grid;
mod rk4;
mod stencil;
mod trajectory;

pub use grid::{FieldPair, Grid1D, MIN_NODES};
pub use rk4::{rk4_step, NonFiniteStage, OdeState};
pub use stencil::fd4_derivative;
pub use trajectory::{DiagnosticSample, RunInfo, Snapshot, Trajectory};

use crate::coefficient::BreakpointFunction;
use crate::diagnostics::{energy, l2_norm, sup_norm};
use crate::error::{Error, Result};
use crate::initial_data::{sample_u0, PulseSpec};
use crate::mollifier::{Mollifier, RegularizedCoefficient, TimeCoefficient};
use crate::scalar::Real;

/// Default and maximum allowed `Δt/Δx`.
pub const DEFAULT_CFL: f64 = 0.4;

/// How the time step is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep<T> {
    Fixed(T),
    /// `Δt = ratio · Δx`.
    Cfl(T),
}

/// What to do when the domain of dependence of the data leaves the grid
/// (or wraps around a periodic one) before `t_end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeGuard {
    Error,
    Warn,
    Off,
}

#[derive(Clone, Debug)]
pub struct SolverConfig<T> {
    pub grid: Grid1D<T>,
    pub time_step: TimeStep<T>,
    pub t_end: T,
    /// Mollifier scale; `None` runs with the raw coefficient, which is only
    /// meaningful for coefficients without jumps.
    pub epsilon: Option<T>,
    pub coefficient: BreakpointFunction<T>,
    pub mollifier: Mollifier<T>,
    pub pulse: PulseSpec<T>,
    pub snapshot_times: Vec<T>,
    /// Record norms every this many steps (and always at the last step).
    pub diag_every: usize,
    pub cfl_max: T,
    pub cone_guard: ConeGuard,
    /// Data below this fraction of its maximum counts as outside the support.
    pub cone_threshold: T,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(grid: Grid1D<T>, coefficient: BreakpointFunction<T>, pulse: PulseSpec<T>) -> Self {
        Self {
            grid,
            time_step: TimeStep::Cfl(T::lit(DEFAULT_CFL)),
            t_end: T::zero(),
            epsilon: None,
            coefficient,
            mollifier: Mollifier::paper(),
            pulse,
            snapshot_times: Vec::new(),
            diag_every: 10,
            cfl_max: T::lit(DEFAULT_CFL),
            cone_guard: ConeGuard::Error,
            cone_threshold: T::lit(1e-3),
        }
    }

    pub fn dt(&self) -> T {
        match self.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(ratio) => ratio * self.grid.dx(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dt = self.dt();
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::config("run.dt", format!("time step must be positive, got {dt}")));
        }
        let ratio = dt / self.grid.dx();
        if ratio > self.cfl_max * (T::one() + T::lit(1e-12).max(T::lit(8.0) * T::epsilon())) {
            return Err(Error::config(
                "run.dt",
                format!(
                    "dt/dx = {ratio} exceeds the CFL limit {} (dt = {dt}, dx = {})",
                    self.cfl_max,
                    self.grid.dx()
                ),
            ));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return Err(Error::config("run.t_end", "final time must be non-negative"));
        }
        if let Some(eps) = self.epsilon {
            if !(eps > T::zero()) {
                return Err(Error::config("run.epsilon", "epsilon must be positive"));
            }
        }
        if self.diag_every == 0 {
            return Err(Error::config("run.diag_every", "must be at least 1"));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= T::zero())) {
            return Err(Error::config("run.snapshot_times", format!("negative time {t}")));
        }
        self.pulse
            .validate()
            .map_err(|e| Error::config("pulse", e.to_string()))?;
        let b0 = self.coefficient_model()?.value(T::zero());
        if !(b0 > T::zero()) {
            return Err(Error::config("coefficient", format!("b_eps(0) = {b0} is not positive")));
        }
        Ok(())
    }

    pub fn coefficient_model(&self) -> Result<CoefficientModel<T>> {
        Ok(match self.epsilon {
            Some(eps) => CoefficientModel::Regularized(
                RegularizedCoefficient::new(self.coefficient.clone(), self.mollifier.clone(), eps)
                    .map_err(|e| Error::config("run.epsilon", e.to_string()))?,
            ),
            None => CoefficientModel::Unregularized(self.coefficient.clone()),
        })
    }

    pub fn schedule(&self) -> StepSchedule<T> {
        StepSchedule::new(self.dt(), self.t_end)
    }

    pub fn run_info(&self) -> RunInfo<T> {
        RunInfo {
            grid: self.grid,
            dt: self.dt(),
            t_end: self.t_end,
            steps: self.schedule().steps(),
            epsilon: self.epsilon,
            coefficient: self.coefficient.clone(),
            pulse: self.pulse.clone(),
        }
    }
}

/// Regularized or raw coefficient.
#[derive(Clone, Debug)]
pub enum CoefficientModel<T> {
    Regularized(RegularizedCoefficient<T>),
    Unregularized(BreakpointFunction<T>),
}

impl<T: Real> TimeCoefficient<T> for CoefficientModel<T> {
    fn value(&self, t: T) -> T {
        match self {
            CoefficientModel::Regularized(r) => r.value(t),
            CoefficientModel::Unregularized(b) => b.eval_extended(t),
        }
    }

    fn derivative(&self, t: T) -> T {
        match self {
            CoefficientModel::Regularized(r) => r.derivative(t),
            CoefficientModel::Unregularized(b) => b.derivative_extended(t, 1),
        }
    }
}

/// Fixed steps of `dt`, the last one shortened so the run ends at `t_end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSchedule<T> {
    dt: T,
    t_end: T,
    steps: usize,
}

impl<T: Real> StepSchedule<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        let ratio = t_end / dt;
        let nearest = ratio.round();
        let steps = if (ratio - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) {
            nearest
        } else {
            ratio.ceil()
        };
        Self {
            dt,
            t_end,
            steps: steps.to_usize().unwrap_or(0),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Time after `n` completed steps.
    pub fn time(&self, n: usize) -> T {
        if n >= self.steps {
            self.t_end
        } else {
            self.dt * T::from_usize_lossy(n)
        }
    }

    /// Step index whose time is closest to `t`.
    pub fn index_near(&self, t: T) -> usize {
        let guess = (t / self.dt).round().to_usize().unwrap_or(0).min(self.steps);
        let lo = guess.saturating_sub(1);
        let hi = (guess + 1).min(self.steps);
        (lo..=hi)
            .min_by(|&a, &b| {
                (self.time(a) - t)
                    .abs()
                    .partial_cmp(&(self.time(b) - t).abs())
                    .expect("finite times")
            })
            .unwrap_or(guess)
    }

    /// Sorted, de-duplicated `(step, requested time)` pairs, always including
    /// the initial and the final state.
    pub fn snapshot_targets(&self, requested: &[T]) -> Vec<(usize, T)> {
        let mut targets: Vec<(usize, T)> = requested
            .iter()
            .map(|&t| (self.index_near(t), t))
            .collect();
        targets.push((0, T::zero()));
        targets.push((self.steps, self.t_end));
        targets.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.partial_cmp(&b.1).expect("finite times"))
        });
        targets.dedup_by_key(|(step, _)| *step);
        targets
    }
}

/// Right-hand side `(−b_ε(t) D₄u, −D₄p / b_ε(t))`.
pub fn system_rhs<T: Real, C: TimeCoefficient<T> + ?Sized>(
    state: &FieldPair<T>,
    t: T,
    coeff: &C,
    grid: &Grid1D<T>,
) -> FieldPair<T> {
    let b = coeff.value(t);
    let mut out = FieldPair::zeros(state.len());
    stencil::fd4_into(&state.u, grid, -b, &mut out.p);
    stencil::fd4_into(&state.p, grid, -T::one() / b, &mut out.u);
    out
}

/// Index range where `|data|` exceeds `threshold · max |data|`.
fn support<T: Real>(data: &[T], threshold: T) -> Option<(usize, usize)> {
    let peak = sup_norm(data);
    if peak == T::zero() {
        return None;
    }
    let cut = threshold * peak;
    let first = data.iter().position(|v| v.abs() > cut)?;
    let last = data.iter().rposition(|v| v.abs() > cut)?;
    Some((first, last))
}

pub(crate) fn check_cone<T: Real>(config: &SolverConfig<T>, initial: &FieldPair<T>) -> Result<Option<String>> {
    if config.cone_guard == ConeGuard::Off || config.t_end == T::zero() {
        return Ok(None);
    }
    let grid = &config.grid;
    let (lo_p, hi_p) = support(&initial.p, config.cone_threshold).unwrap_or((grid.len() / 2, grid.len() / 2));
    let (lo_u, hi_u) = support(&initial.u, config.cone_threshold).unwrap_or((lo_p, hi_p));
    let left = grid.node(lo_p.min(lo_u)) - config.t_end;
    let right = grid.node(hi_p.max(hi_u)) + config.t_end;
    let (inner_lo, inner_hi) = if grid.is_periodic() {
        (grid.xmin(), grid.xmax())
    } else {
        (grid.node(2), grid.node(grid.len() - 3))
    };
    if left >= inner_lo && right <= inner_hi {
        return Ok(None);
    }
    let what = if grid.is_periodic() { "wraps around" } else { "reaches the boundary of" };
    let message = format!(
        "domain of dependence [{left}, {right}] at t = {} {what} the grid [{}, {}]",
        config.t_end,
        grid.xmin(),
        grid.xmax()
    );
    match config.cone_guard {
        ConeGuard::Error => Err(Error::config("run.t_end", message)),
        _ => Ok(Some(message)),
    }
}

/// Advances the configured problem from `t = 0` to `t_end`.
pub fn run<T: Real>(config: &SolverConfig<T>) -> Result<Trajectory<T>> {
    config.validate()?;
    let coeff = config.coefficient_model()?;
    let grid = config.grid;
    let schedule = config.schedule();
    let u0 = sample_u0(&config.pulse, &grid)?;
    let mut state = FieldPair {
        p: u0.clone(),
        u: u0,
    };
    let mut warnings = Vec::new();
    if let Some(w) = check_cone(config, &state)? {
        warnings.push(w);
    }

    let targets = schedule.snapshot_targets(&config.snapshot_times);
    let mut next_target = 0;
    let mut snapshots = Vec::with_capacity(targets.len());
    let mut series = Vec::new();
    let steps = schedule.steps();
    for n in 0..=steps {
        let t = schedule.time(n);
        while next_target < targets.len() && targets[next_target].0 == n {
            snapshots.push(Snapshot {
                requested: targets[next_target].1,
                time: t,
                step: n,
                fields: state.clone(),
            });
            next_target += 1;
        }
        if n % config.diag_every == 0 || n == steps {
            series.push(DiagnosticSample {
                time: t,
                l2_u: l2_norm(&state.u, &grid),
                sup_u: sup_norm(&state.u),
                energy: energy(&state, &grid),
            });
        }
        if n == steps {
            break;
        }
        let h = schedule.time(n + 1) - t;
        state = rk4_step(&state, t, h, |s, tt| system_rhs(s, tt, &coeff, &grid)).map_err(|_| {
            Error::Instability {
                step: n + 1,
                time: schedule.time(n + 1).to_f64_lossy(),
            }
        })?;
    }

    Ok(Trajectory {
        info: config.run_info(),
        snapshots,
        series,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::l2_norm;

    fn translation_config(n: usize, t_end: f64) -> SolverConfig<f64> {
        let grid = Grid1D::periodic(-15.0, 25.0, n).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::constant(1.0), PulseSpec::paper_gaussian());
        cfg.t_end = t_end;
        cfg
    }

    fn translation_error(traj: &Trajectory<f64>) -> f64 {
        let snap = traj.final_snapshot().unwrap();
        let pulse = PulseSpec::paper_gaussian();
        traj.grid()
            .nodes()
            .iter()
            .zip(&snap.fields.u)
            .map(|(x, u)| (u - pulse.value(x - snap.time).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn schedule_lands_on_final_time() {
        let s = StepSchedule::new(0.0067f64, 60.0);
        assert_eq!(s.steps(), 8956);
        assert_eq!(s.time(s.steps()), 60.0);
        assert!(s.time(s.steps()) - s.time(s.steps() - 1) <= 0.0067);
        let exact = StepSchedule::new(0.1f64, 1.0);
        assert_eq!(exact.steps(), 10);
        assert_eq!(exact.index_near(0.52), 5);
        let targets = exact.snapshot_targets(&[0.5, 0.52, 0.0, 2.0]);
        assert_eq!(targets.iter().map(|t| t.0).collect::<Vec<_>>(), vec![0, 5, 10]);
        assert_eq!(exact.snapshot_targets(&[]).len(), 2);
    }

    #[test]
    fn rhs_examples() {
        let grid = Grid1D::periodic(0.0, 2.0 * std::f64::consts::PI, 64).unwrap();
        let f: Vec<f64> = grid.nodes().iter().map(|x| x.sin()).collect();
        let one = BreakpointFunction::constant(1.0);
        let zero_u = FieldPair { p: f.clone(), u: vec![0.0; 64] };
        assert!(system_rhs(&zero_u, 0.0, &one, &grid).p.iter().all(|v| *v == 0.0));

        let pair = FieldPair { p: f.clone(), u: f.clone() };
        let rate = system_rhs(&pair, 0.0, &one, &grid);
        let d = fd4_derivative(&f, &grid).unwrap();
        for i in 0..64 {
            assert_eq!(rate.p[i], -d[i]);
            assert_eq!(rate.u[i], -d[i]);
        }

        let reg = RegularizedCoefficient::new(BreakpointFunction::paper(), Mollifier::paper(), 0.5).unwrap();
        let scaled = system_rhs(&pair, 3.0, &reg, &grid);
        assert_eq!(scaled.p, rate.p);
    }

    #[test]
    fn single_step_translation() {
        let grid = Grid1D::with_spacing(-15.0, 25.0, 0.0171, true).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::constant(1.0), PulseSpec::paper_gaussian());
        cfg.time_step = TimeStep::Fixed(0.0067);
        cfg.t_end = 0.0067;
        let traj = run(&cfg).unwrap();
        assert!(translation_error(&traj) <= 1e-6);
    }

    #[test]
    fn zero_final_time_returns_initial_data() {
        let cfg = translation_config(400, 0.0);
        let traj = run(&cfg).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        let u0 = sample_u0(&cfg.pulse, &cfg.grid).unwrap();
        assert_eq!(traj.snapshots[0].fields.u, u0);
        assert_eq!(traj.snapshots[0].fields.p, u0);
    }

    #[test]
    fn cfl_violation_names_the_key() {
        let mut cfg = translation_config(400, 1.0);
        cfg.time_step = TimeStep::Fixed(2.0 * cfg.grid.dx());
        match run(&cfg) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "run.dt"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn cone_guard_modes() {
        let mut cfg = translation_config(400, 30.0);
        assert!(matches!(run(&cfg), Err(Error::Config { .. })));
        cfg.cone_guard = ConeGuard::Warn;
        cfg.t_end = 30.0;
        cfg.diag_every = 1000;
        let traj = run(&cfg).unwrap();
        assert_eq!(traj.warnings.len(), 1);
    }

    #[test]
    fn energy_is_conserved_for_constant_coefficient() {
        let mut cfg = translation_config(2340, 10.0);
        cfg.diag_every = 100;
        let traj = run(&cfg).unwrap();
        let e0 = traj.series[0].energy;
        let drift = traj
            .series
            .iter()
            .map(|s| ((s.energy - e0) / e0).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-6, "drift {drift}");
    }

    #[test]
    fn time_reversal_returns_initial_state() {
        let grid = Grid1D::periodic(-15.0, 25.0, 2340).unwrap();
        let one = BreakpointFunction::constant(1.0);
        let u0 = sample_u0(&PulseSpec::paper_gaussian(), &grid).unwrap();
        let start = FieldPair { p: u0.clone(), u: u0 };
        let dt = 0.4 * grid.dx();
        let mut state = start.clone();
        let steps = 200;
        for n in 0..steps {
            state = rk4_step(&state, n as f64 * dt, dt, |s, t| system_rhs(s, t, &one, &grid)).unwrap();
        }
        for n in (0..steps).rev() {
            state = rk4_step(&state, (n + 1) as f64 * dt, -dt, |s, t| system_rhs(s, t, &one, &grid)).unwrap();
        }
        let err = start
            .u
            .iter()
            .chain(&start.p)
            .zip(state.u.iter().chain(&state.p))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-8, "err {err}");
    }

    #[test]
    fn translation_error_and_refinement() {
        let coarse = run(&translation_config(2340, 10.0)).unwrap();
        let fine = run(&translation_config(4680, 10.0)).unwrap();
        let (ec, ef) = (translation_error(&coarse), translation_error(&fine));
        assert!(ec <= 1e-4, "coarse error {ec}");
        let ratio = ec / ef;
        assert!((ratio - 16.0).abs() <= 2.0, "ratio {ratio}");
    }

    #[test]
    fn bounded_grid_short_run_matches_translation() {
        let grid = Grid1D::bounded(-15.0, 25.0, 2341).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::constant(1.0), PulseSpec::paper_gaussian());
        cfg.t_end = 5.0;
        let traj = run(&cfg).unwrap();
        assert!(translation_error(&traj) <= 1e-4);
    }

    #[test]
    fn dissipation_does_not_grow_the_solution() {
        let grid = Grid1D::periodic(-30.0, 30.0, 2400).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::paper(), PulseSpec::paper_gaussian());
        cfg.epsilon = Some(0.1);
        cfg.t_end = 20.0;
        let traj = run(&cfg).unwrap();
        let first = traj.series.iter().filter(|s| s.time <= 1.0).map(|s| s.l2_u).fold(0.0, f64::max);
        let last = traj.series.last().unwrap().l2_u;
        assert!(last <= first * 1.01);
        let u = &traj.final_snapshot().unwrap().fields.u;
        assert!(l2_norm(u, &grid) < first);
    }
}
