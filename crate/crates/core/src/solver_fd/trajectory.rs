use crate::coefficient::BreakpointFunction;
use crate::initial_data::PulseSpec;
use crate::scalar::Real;

use super::grid::{FieldPair, Grid1D};

/// Fields recorded at one completed step.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T> {
    /// Time that was asked for.
    pub requested: T,
    /// Time of the completed step that was stored.
    pub time: T,
    pub step: usize,
    pub fields: FieldPair<T>,
}

/// Norms recorded along a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticSample<T> {
    pub time: T,
    pub l2_u: T,
    pub sup_u: T,
    pub energy: T,
}

/// Settings a trajectory was produced with.
#[derive(Clone, Debug, PartialEq)]
pub struct RunInfo<T> {
    pub grid: Grid1D<T>,
    pub dt: T,
    pub t_end: T,
    pub steps: usize,
    pub epsilon: Option<T>,
    pub coefficient: BreakpointFunction<T>,
    pub pulse: PulseSpec<T>,
}

impl<T: Real> RunInfo<T> {
    /// Whether two runs differ at most in `ε`.
    pub fn same_setup_except_epsilon(&self, other: &Self) -> bool {
        self.grid == other.grid
            && self.dt == other.dt
            && self.t_end == other.t_end
            && self.coefficient == other.coefficient
            && self.pulse == other.pulse
    }
}

/// Time-ordered snapshots plus a diagnostic series.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub info: RunInfo<T>,
    pub snapshots: Vec<Snapshot<T>>,
    pub series: Vec<DiagnosticSample<T>>,
    pub warnings: Vec<String>,
}

impl<T: Real> Trajectory<T> {
    pub fn grid(&self) -> &Grid1D<T> {
        &self.info.grid
    }

    /// Snapshot whose stored time is closest to `t`.
    pub fn snapshot_near(&self, t: T) -> Option<&Snapshot<T>> {
        self.snapshots.iter().min_by(|a, b| {
            (a.time - t)
                .abs()
                .partial_cmp(&(b.time - t).abs())
                .expect("finite times")
        })
    }

    pub fn final_snapshot(&self) -> Option<&Snapshot<T>> {
        self.snapshots.last()
    }

    /// Diagnostic sample whose time is closest to `t`.
    pub fn sample_near(&self, t: T) -> Option<&DiagnosticSample<T>> {
        self.series.iter().min_by(|a, b| {
            (a.time - t)
                .abs()
                .partial_cmp(&(b.time - t).abs())
                .expect("finite times")
        })
    }
}
