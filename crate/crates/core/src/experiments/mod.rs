//! Presets and studies built from the solvers and diagnostics.

mod dashboard;
mod decay;
mod echo;
mod presets;
mod sweep;

pub use dashboard::{
    classify_case, grows_without_bound, theorem_dashboard, AsymptoticCase, BoundEntry, BoundTable, CaseReport,
    Dashboard, DashboardOptions, CASE_THRESHOLD,
};
pub use decay::{decay_experiment, decay_study, DecayStudy};
pub use echo::{echo_experiment, jump_time, lorentzian_family, EchoExperiment};
pub use presets::{
    echo_snapshot_times, lorentzian_snapshot_times, paper_gaussian, paper_lorentzian, LORENTZIAN_RUNS,
    PAPER_EPSILONS,
};
pub use sweep::{
    limit_comparison, refinement_study, restrict, run_family, sweep_epsilon, ConvergenceRow, ConvergenceTable,
    LimitTable, RefinementStudy, SweepResult,
};
