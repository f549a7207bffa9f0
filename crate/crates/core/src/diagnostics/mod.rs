//! Norms and feature extraction on solver output.

mod bounds;
mod decay;
mod echo;
mod norms;
mod peaks;

pub use bounds::{uniform_bound_summary, BoundRow, BoundSummary};
pub use decay::{fit_decay, fit_decay_series, DecayFit, DEFAULT_DECAY_START};
pub use echo::{track_echo, track_peaks, EchoOptions, EchoReport, PeakTrack};
pub use norms::{energy, l2_distance, l2_norm, sup_norm};
pub use peaks::{detect_peaks, PeakRecord, DEFAULT_MIN_FRACTION};
