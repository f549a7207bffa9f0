use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver_fd::Grid1D;

/// Default amplitude floor, as a fraction of the global maximum of `|u|`.
pub const DEFAULT_MIN_FRACTION: f64 = 0.05;

/// A local maximum of `|u|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakRecord<T> {
    pub time: T,
    /// Sub-grid location from a parabola through the three top samples.
    pub location: T,
    /// Refined peak height of `|u|`.
    pub amplitude: T,
    /// Sign of `u` at the peak.
    pub sign: T,
    /// Full width at half maximum, from linearly interpolated crossings.
    pub fwhm: T,
    /// Filled in by tracking across snapshots.
    pub velocity: Option<T>,
    pub index: usize,
}

fn neighbour(i: isize, n: usize, periodic: bool) -> Option<usize> {
    if (0..n as isize).contains(&i) {
        Some(i as usize)
    } else if periodic {
        Some(i.rem_euclid(n as isize) as usize)
    } else {
        None
    }
}

/// Distance from node `i` to the half-height crossing, walking in `dir`.
fn half_crossing<T: Real>(a: &[T], i: usize, dir: isize, half: T, periodic: bool) -> Option<T> {
    let n = a.len();
    let mut prev = a[i];
    for step in 1..n {
        let j = neighbour(i as isize + dir * step as isize, n, periodic)?;
        if a[j] < half {
            let frac = (prev - half) / (prev - a[j]);
            return Some(T::from_usize_lossy(step - 1) + frac);
        }
        prev = a[j];
    }
    None
}

/// Local maxima of `|field|` above `min_fraction` of its global maximum.
///
/// Peaks whose half-height crossings cannot be found (they touch a bounded
/// edge) are dropped.
pub fn detect_peaks<T: Real>(
    field: &[T],
    grid: &Grid1D<T>,
    time: T,
    min_fraction: T,
) -> Result<Vec<PeakRecord<T>>> {
    if !(min_fraction > T::zero() && min_fraction < T::one()) {
        return Err(Error::Domain(format!(
            "amplitude fraction must lie in (0, 1), got {min_fraction}"
        )));
    }
    if field.len() != grid.len() {
        return Err(Error::Grid(format!(
            "field has {} values, grid has {} nodes",
            field.len(),
            grid.len()
        )));
    }
    let a: Vec<T> = field.iter().map(|v| v.abs()).collect();
    let top = a.iter().fold(T::zero(), |m, v| m.max(*v));
    if top == T::zero() {
        return Ok(Vec::new());
    }
    let floor = min_fraction * top;
    let n = a.len();
    let periodic = grid.is_periodic();
    let dx = grid.dx();
    let half = T::lit(0.5);
    let mut peaks = Vec::new();
    for i in 0..n {
        if a[i] <= floor {
            continue;
        }
        let (Some(l), Some(r)) = (
            neighbour(i as isize - 1, n, periodic),
            neighbour(i as isize + 1, n, periodic),
        ) else {
            continue;
        };
        if !(a[i] >= a[l] && a[i] > a[r]) {
            continue;
        }
        let curvature = a[l] - T::lit(2.0) * a[i] + a[r];
        let offset = if curvature < T::zero() {
            half * (a[l] - a[r]) / curvature
        } else {
            T::zero()
        };
        let amplitude = a[i] - T::lit(0.25) * (a[l] - a[r]) * offset;
        let level = half * amplitude;
        let (Some(left), Some(right)) = (
            half_crossing(&a, i, -1, level, periodic),
            half_crossing(&a, i, 1, level, periodic),
        ) else {
            continue;
        };
        let mut location = grid.node(i) + offset * dx;
        if periodic {
            let span = grid.span();
            while location < grid.xmin() {
                location = location + span;
            }
            while location >= grid.xmax() {
                location = location - span;
            }
        }
        peaks.push(PeakRecord {
            time,
            location,
            amplitude,
            sign: field[i].signum(),
            fwhm: (left + right) * dx,
            velocity: None,
            index: i,
        });
    }
    Ok(peaks)
}
