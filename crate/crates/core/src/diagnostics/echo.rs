use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver_fd::{Grid1D, Trajectory};

use super::peaks::{detect_peaks, PeakRecord, DEFAULT_MIN_FRACTION};

/// Knobs of the echo tracker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EchoOptions<T> {
    /// Peak floor as a fraction of the snapshot's maximum of `|u|`.
    pub min_fraction: T,
    /// Consecutive snapshots a peak must survive to count.
    pub persistence: usize,
    /// Largest snapshot spacing accepted right after the jump.
    pub max_spacing: T,
    /// Slowest mean speed for a track to count as travelling.
    pub min_speed: T,
}

impl<T: Real> Default for EchoOptions<T> {
    fn default() -> Self {
        Self {
            min_fraction: T::lit(DEFAULT_MIN_FRACTION),
            persistence: 3,
            max_spacing: T::lit(0.4),
            min_speed: T::lit(0.5),
        }
    }
}

/// Peaks linked across consecutive snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakTrack<T> {
    /// Index of the first snapshot the track appears in.
    pub start: usize,
    pub peaks: Vec<PeakRecord<T>>,
}

impl<T: Real> PeakTrack<T> {
    pub fn end(&self) -> usize {
        self.start + self.peaks.len() - 1
    }

    pub fn at(&self, snapshot: usize) -> Option<&PeakRecord<T>> {
        snapshot
            .checked_sub(self.start)
            .and_then(|i| self.peaks.get(i))
    }

    /// Mean of the recorded velocities.
    pub fn mean_velocity(&self) -> Option<T> {
        let v: Vec<T> = self.peaks.iter().filter_map(|p| p.velocity).collect();
        if v.is_empty() {
            return None;
        }
        Some(v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len()))
    }

    /// Sign of the mean velocity when its magnitude reaches `min_speed`.
    pub fn direction(&self, min_speed: T) -> Option<T> {
        self.mean_velocity()
            .filter(|v| v.abs() >= min_speed && *v != T::zero())
            .map(|v| v.signum())
    }

    pub fn max_amplitude(&self) -> T {
        self.peaks.iter().fold(T::zero(), |m, p| m.max(p.amplitude))
    }
}

/// Echo found after a coefficient jump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EchoReport<T> {
    pub birth_time: T,
    /// Both peaks are taken from the last snapshot containing both tracks.
    pub primary: PeakRecord<T>,
    pub echo: PeakRecord<T>,
    pub amplitude_ratio: T,
    pub width_ratio: T,
    pub echo_direction: T,
    pub primary_direction: T,
}

fn displacement<T: Real>(from: T, to: T, grid: &Grid1D<T>) -> T {
    let d = to - from;
    if !grid.is_periodic() {
        return d;
    }
    let span = grid.span();
    let half = span / T::lit(2.0);
    if d > half {
        d - span
    } else if d < -half {
        d + span
    } else {
        d
    }
}

/// First snapshot after `before` from which the track moves in `direction`
/// for `persistence` snapshots: the following `persistence − 1` velocities
/// all have that sign and their mean speed is at least `min_speed`.
fn echo_birth<T: Real>(track: &PeakTrack<T>, before: usize, direction: T, options: &EchoOptions<T>) -> Option<usize> {
    let after = options.persistence.max(1) - 1;
    (track.start.max(before + 1)..=track.end()).find(|&j| {
        let v: Option<Vec<T>> = (1..=after).map(|k| track.at(j + k).and_then(|p| p.velocity)).collect();
        match v {
            Some(v) if !v.is_empty() => {
                let mean = v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len());
                v.iter().all(|x| *x * direction > T::zero()) && mean.abs() >= options.min_speed
            }
            Some(_) => track.direction(options.min_speed) == Some(direction),
            None => false,
        }
    })
}

/// Largest amplitude ratio between linked peaks.
pub const MAX_AMPLITUDE_CHANGE: f64 = 2.0;

/// Links peaks of consecutive snapshots greedily, ranking candidate links by
/// the miss from where each track is expected to be plus the log amplitude
/// change, each scaled by its limit. A track with a known velocity `v` is expected at
/// `x + v Δt` within `Δt + 3 Δx`; a new track anywhere within `1.5 Δt + 3 Δx`,
/// since waves move at most one unit per unit time. Linked peaks must also
/// agree in amplitude to within [`MAX_AMPLITUDE_CHANGE`], which keeps tracks
/// off dispersive ripples.
pub fn track_peaks<T: Real>(frames: &[(T, Vec<PeakRecord<T>>)], grid: &Grid1D<T>) -> Vec<PeakTrack<T>> {
    let mut tracks: Vec<PeakTrack<T>> = Vec::new();
    for (j, (time, peaks)) in frames.iter().enumerate() {
        let mut taken = vec![false; peaks.len()];
        if j > 0 {
            let dt = *time - frames[j - 1].0;
            let slack = T::lit(3.0) * grid.dx();
            let mut pairs = Vec::new();
            for (ti, track) in tracks.iter().enumerate() {
                if track.end() != j - 1 {
                    continue;
                }
                let last = track.peaks.last().expect("non-empty track");
                let (shift, radius) = match last.velocity {
                    Some(v) => (v * dt, dt + slack),
                    None => (T::zero(), T::lit(1.5) * dt + slack),
                };
                for (pi, peak) in peaks.iter().enumerate() {
                    let d = displacement(last.location, peak.location, grid);
                    let miss = (d - shift).abs();
                    let change = (peak.amplitude / last.amplitude).max(last.amplitude / peak.amplitude);
                    let limit = T::lit(MAX_AMPLITUDE_CHANGE);
                    if miss <= radius && change <= limit {
                        let cost = miss / radius + change.ln() / limit.ln();
                        pairs.push((cost, ti, pi, d));
                    }
                }
            }
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances"));
            let mut extended = vec![false; tracks.len()];
            for (_, ti, pi, d) in pairs {
                if extended[ti] || taken[pi] {
                    continue;
                }
                extended[ti] = true;
                taken[pi] = true;
                let mut peak = peaks[pi];
                if dt > T::zero() {
                    peak.velocity = Some(d / dt);
                }
                tracks[ti].peaks.push(peak);
            }
        }
        for (pi, peak) in peaks.iter().enumerate() {
            if !taken[pi] {
                tracks.push(PeakTrack {
                    start: j,
                    peaks: vec![*peak],
                });
            }
        }
    }
    tracks
}

/// Looks for a persistent peak moving against the primary pulse that appears
/// after `jump_time`.
///
/// The primary is the largest peak at the last snapshot not after the jump.
/// Among opposite-moving tracks born later and surviving
/// `options.persistence` snapshots, the one with the largest amplitude is
/// reported.
pub fn track_echo<T: Real>(
    trajectory: &Trajectory<T>,
    jump_time: T,
    options: &EchoOptions<T>,
) -> Result<Option<EchoReport<T>>> {
    let grid = trajectory.grid();
    let snaps = &trajectory.snapshots;
    let slack = T::lit(1e-9);
    let before = snaps
        .iter()
        .rposition(|s| s.time <= jump_time + slack)
        .ok_or_else(|| Error::Diagnostics(format!("no snapshot at or before t = {jump_time}")))?;
    let needed = before + options.persistence;
    if needed >= snaps.len() {
        return Err(Error::Diagnostics(format!(
            "need {} snapshots after t = {}, found {}",
            options.persistence,
            snaps[before].time,
            snaps.len() - before - 1
        )));
    }
    for w in snaps[before..=needed].windows(2) {
        if w[1].time - w[0].time > options.max_spacing {
            return Err(Error::Diagnostics(format!(
                "snapshot spacing {} between t = {} and t = {} exceeds {} near the jump",
                w[1].time - w[0].time,
                w[0].time,
                w[1].time,
                options.max_spacing
            )));
        }
    }

    let frames = snaps
        .iter()
        .map(|s| Ok((s.time, detect_peaks(&s.fields.u, grid, s.time, options.min_fraction)?)))
        .collect::<Result<Vec<_>>>()?;
    let tracks = track_peaks(&frames, grid);

    let Some(primary) = tracks
        .iter()
        .filter_map(|t| t.at(before).map(|p| (t, p.amplitude)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite amplitudes"))
        .map(|(t, _)| t)
    else {
        return Ok(None);
    };
    let primary_direction = primary.direction(options.min_speed).ok_or_else(|| {
        Error::Diagnostics("the primary pulse is not tracked as a travelling wave".into())
    })?;

    let echo = tracks
        .iter()
        .filter_map(|t| {
            let birth = echo_birth(t, before, -primary_direction, options)?;
            let peak = t.peaks[birth - t.start..]
                .iter()
                .map(|p| p.amplitude)
                .fold(T::zero(), T::max);
            Some((t, birth, peak))
        })
        .filter(|(_, birth, _)| *birth <= primary.end())
        .max_by(|a, b| a.2.partial_cmp(&b.2).expect("finite amplitudes"));
    let Some((echo, birth, _)) = echo else {
        return Ok(None);
    };

    let common = echo.end().min(primary.end());
    let (p, e) = (*primary.at(common).expect("overlap"), *echo.at(common).expect("overlap"));
    Ok(Some(EchoReport {
        birth_time: snaps[birth].time,
        primary: p,
        echo: e,
        amplitude_ratio: e.amplitude / p.amplitude,
        width_ratio: e.fwhm / p.fwhm,
        echo_direction: -primary_direction,
        primary_direction,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::BreakpointFunction;
    use crate::initial_data::PulseSpec;
    use crate::solver_fd::{run, FieldPair, RunInfo, Snapshot, SolverConfig};

    fn synthetic(times: &[f64]) -> Trajectory<f64> {
        let grid = Grid1D::periodic(-20.0, 20.0, 4000).unwrap();
        let bump = |x: f64, c: f64, a: f64| a * (-(x - c).powi(2) / 0.3).exp();
        let snapshots = times
            .iter()
            .enumerate()
            .map(|(step, &t)| {
                let u: Vec<f64> = grid
                    .nodes()
                    .iter()
                    .map(|&x| {
                        let echo = if t >= 5.5 { bump(x, -(t - 5.5), 0.4) } else { 0.0 };
                        bump(x, t, 1.0) + echo
                    })
                    .collect();
                Snapshot {
                    requested: t,
                    time: t,
                    step,
                    fields: FieldPair { p: u.clone(), u },
                }
            })
            .collect();
        Trajectory {
            info: RunInfo {
                grid,
                dt: 0.01,
                t_end: 8.0,
                steps: 800,
                epsilon: None,
                coefficient: BreakpointFunction::constant(1.0),
                pulse: PulseSpec::paper_gaussian(),
            },
            snapshots,
            series: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn paper_times() -> Vec<f64> {
        let mut t = vec![0.0];
        t.extend((0..=13).map(|i| 4.8 + 0.2 * i as f64));
        t
    }

    #[test]
    fn synthetic_echo_is_found() {
        let traj = synthetic(&paper_times());
        let report = track_echo(&traj, 5.0, &EchoOptions::default()).unwrap().unwrap();
        assert!((report.birth_time - 5.5).abs() <= 0.2 + 1e-9, "birth {}", report.birth_time);
        assert!((report.amplitude_ratio - 0.4).abs() < 1e-3);
        assert!((report.width_ratio - 1.0).abs() < 1e-3);
        assert_eq!(report.primary_direction, 1.0);
        assert_eq!(report.echo_direction, -1.0);
        assert!((report.echo.velocity.unwrap() + 1.0).abs() < 1e-3);
    }

    #[test]
    fn sparse_snapshots_are_rejected() {
        let traj = synthetic(&[0.0, 4.8, 5.6, 6.4, 7.2]);
        assert!(matches!(
            track_echo(&traj, 5.0, &EchoOptions::default()),
            Err(Error::Diagnostics(_))
        ));
        let traj = synthetic(&[0.0, 4.8, 5.0]);
        assert!(track_echo(&traj, 5.0, &EchoOptions::default()).is_err());
    }

    #[test]
    fn pure_transport_has_no_echo() {
        let grid = Grid1D::periodic(-15.0, 25.0, 2000).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::constant(1.0), PulseSpec::paper_gaussian());
        cfg.t_end = 7.2;
        cfg.snapshot_times = paper_times();
        let traj = run(&cfg).unwrap();
        assert!(track_echo(&traj, 5.0, &EchoOptions::default()).unwrap().is_none());
    }

    #[test]
    fn tracker_links_moving_peaks() {
        let grid = Grid1D::periodic(-10.0, 10.0, 100).unwrap();
        let peak = |t: f64, x: f64| PeakRecord {
            time: t,
            location: x,
            amplitude: 1.0,
            sign: 1.0,
            fwhm: 1.0,
            velocity: None,
            index: 0,
        };
        let frames = vec![
            (0.0, vec![peak(0.0, 9.9)]),
            (0.2, vec![peak(0.2, -9.9)]),
            (0.4, vec![peak(0.4, -9.7), peak(0.4, 3.0)]),
        ];
        let tracks = track_peaks(&frames, &grid);
        assert_eq!(tracks.len(), 2);
        assert_eq!(tracks[0].peaks.len(), 3);
        assert!((tracks[0].peaks[1].velocity.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(tracks[1].start, 2);
        assert_eq!(tracks[1].direction(0.5), None);
    }
}
