use crate::coefficient::BreakpointFunction;
use crate::initial_data::PulseSpec;
use crate::scalar::Real;
use crate::solver_fd::{ConeGuard, Grid1D, SolverConfig, TimeStep};

/// ε values of the full-resolution sweeps.
pub const PAPER_EPSILONS: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];

/// Lorentzian scales with their `(Δt, Δx)`.
pub const LORENTZIAN_RUNS: [(f64, f64, f64); 3] = [(0.05, 0.0011, 0.025), (0.03, 8e-4, 0.025), (0.01, 2.28e-4, 0.008)];

/// `t = 4.8, 5.0, …, 7.2`.
pub fn echo_snapshot_times<T: Real>() -> Vec<T> {
    (0..=12).map(|i| T::lit(4.8 + 0.2 * i as f64)).collect()
}

/// Every 0.2 from 4.8 to 8.0.
pub fn lorentzian_snapshot_times<T: Real>() -> Vec<T> {
    (0..=16).map(|i| T::lit(4.8 + 0.2 * i as f64)).collect()
}

/// Gaussian `δ = 0.3` on periodic `[−50, 70]`, `Δx ≈ 0.0171`, `Δt = 0.0067`, up to `t = 60`.
///
/// The left-moving part reaches `x = −50` near the end of the run, so the
/// cone check only warns.
pub fn paper_gaussian<T: Real>(epsilon: T) -> SolverConfig<T> {
    let grid = Grid1D::with_spacing(T::lit(-50.0), T::lit(70.0), T::lit(0.0171), true)
        .expect("valid preset grid");
    let mut cfg = SolverConfig::new(grid, BreakpointFunction::paper(), PulseSpec::paper_gaussian());
    cfg.time_step = TimeStep::Fixed(T::lit(0.0067));
    cfg.t_end = T::lit(60.0);
    cfg.epsilon = Some(epsilon);
    cfg.cone_guard = ConeGuard::Warn;
    let mut times = echo_snapshot_times();
    times.push(T::lit(60.0));
    cfg.snapshot_times = times;
    cfg
}

/// Lorentzian pulse with scale `e` on periodic `[−20, 20]` up to `t = 8`, `ε = 0.01`.
///
/// Scales without a tabulated resolution use `Δx = e/2`, `Δt = 0.4 Δx`.
pub fn paper_lorentzian<T: Real>(scale: T) -> SolverConfig<T> {
    let e = scale.to_f64_lossy();
    let (dt, dx) = LORENTZIAN_RUNS
        .iter()
        .find(|(s, _, _)| (s - e).abs() < 1e-12)
        .map(|&(_, dt, dx)| (dt, dx))
        .unwrap_or((0.2 * e, 0.5 * e));
    let grid = Grid1D::with_spacing(T::lit(-20.0), T::lit(20.0), T::lit(dx), true).expect("valid preset grid");
    let mut cfg = SolverConfig::new(grid, BreakpointFunction::paper(), PulseSpec::Lorentzian { scale });
    cfg.time_step = TimeStep::Fixed(T::lit(dt));
    cfg.t_end = T::lit(8.0);
    cfg.epsilon = Some(T::lit(0.01));
    cfg.snapshot_times = lorentzian_snapshot_times();
    cfg
}
