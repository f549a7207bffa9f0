//! Piecewise-polynomial coefficients with jump discontinuities.
//!
//! A [`BreakpointFunction`] is a left-closed, right-open piecewise polynomial
//! `b(t)`, with a constant extension below the first breakpoint. It models the
//! time-dependent impedance `b` of the dissipative wave equation
//! `u_tt - u_xx + (b'/b) u_t = 0`, which only makes sense as a distribution when
//! `b` jumps. [`ImpedanceProfile`] holds the depth-dependent density and wave
//! speed of a layered medium together with the travel-time change of variables
//! that turns the acoustic system into that equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Highest polynomial degree allowed on a piece.
pub const MAX_PIECE_DEGREE: usize = 3;

/// Polynomial in the absolute time variable, coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn constant(value: T) -> Self {
        Self { coeffs: vec![value] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * t + c)
    }

    /// `k`-th derivative evaluated at `t`.
    pub fn eval_derivative(&self, t: T, k: usize) -> T {
        if k == 0 {
            return self.eval(t);
        }
        let mut acc = T::zero();
        for (power, &c) in self.coeffs.iter().enumerate().skip(k).rev() {
            let mut falling = T::one();
            for j in 0..k {
                falling = falling * T::from_usize_lossy(power - j);
            }
            acc = acc * t + c * falling;
        }
        acc
    }
}

/// Result of sampling a coefficient on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub samples: usize,
    pub min_value: T,
    pub max_value: T,
    pub monotone: bool,
    pub positive: bool,
    pub monotonicity_violations: usize,
    /// Left end of the first sampled interval on which the value decreased.
    pub first_violation: Option<T>,
    /// Smallest sampled value, i.e. the measured lower bound `b₀`.
    pub detected_lower_bound: T,
}

impl<T> ValidationReport<T> {
    pub fn is_admissible(&self) -> bool {
        self.monotone && self.positive
    }
}

/// Piecewise polynomial `b(t)` with an explicit breakpoint list.
///
/// Piece `i` covers `[breakpoints[i], breakpoints[i + 1])`; the last piece
/// extends to infinity and `left_value` applies below the first breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct BreakpointFunction<T> {
    left: Polynomial<T>,
    breakpoints: Vec<T>,
    pieces: Vec<Polynomial<T>>,
    lower_bound: T,
}

impl<T: Real> BreakpointFunction<T> {
    /// Builds a coefficient from a constant left extension and ordered
    /// `(breakpoint, coefficients)` entries.
    pub fn new(left_value: T, entries: Vec<(T, Vec<T>)>) -> Result<Self> {
        if !left_value.is_finite() {
            return Err(Error::Domain("left extension must be finite".into()));
        }
        let mut breakpoints = Vec::with_capacity(entries.len());
        let mut pieces = Vec::with_capacity(entries.len());
        for (i, (bp, coeffs)) in entries.into_iter().enumerate() {
            if !bp.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Domain(format!("piece {i} has non-finite data")));
            }
            if let Some(&prev) = breakpoints.last() {
                if bp <= prev {
                    return Err(Error::Domain(format!(
                        "breakpoints must be strictly increasing ({prev} then {bp})"
                    )));
                }
            }
            let poly = Polynomial::new(coeffs);
            if poly.degree() > MAX_PIECE_DEGREE {
                return Err(Error::Domain(format!(
                    "piece {i} has degree {} > {MAX_PIECE_DEGREE}",
                    poly.degree()
                )));
            }
            breakpoints.push(bp);
            pieces.push(poly);
        }
        let mut lower_bound = left_value;
        for (bp, poly) in breakpoints.iter().zip(&pieces) {
            lower_bound = lower_bound.min(poly.eval(*bp));
        }
        Ok(Self {
            left: Polynomial::constant(left_value),
            breakpoints,
            pieces,
            lower_bound,
        })
    }

    /// `b ≡ value`.
    pub fn constant(value: T) -> Self {
        Self::new(value, Vec::new()).expect("finite constant")
    }

    /// The synthetic coefficient `b(t) = 1` for `t < 5`, `t/10 + 3/2` for `t ≥ 5`.
    pub fn paper() -> Self {
        Self::new(T::one(), vec![(T::lit(5.0), vec![T::lit(1.5), T::lit(0.1)])])
            .expect("valid preset")
    }

    /// `b(t) = start + slope * t` for `t ≥ 0`, constant `start` before.
    pub fn linear_ramp(start: T, slope: T) -> Self {
        Self::new(start, vec![(T::zero(), vec![start, slope])]).expect("valid ramp")
    }

    /// `b(t) = c0 + c2 t²` for `t ≥ 0`, constant before.
    pub fn quadratic(c0: T, c2: T) -> Self {
        Self::new(c0, vec![(T::zero(), vec![c0, T::zero(), c2])]).expect("valid quadratic")
    }

    /// C¹ cubic transition from `from` (before `t0`) to `to` (after `t1`).
    pub fn smooth_step(t0: T, t1: T, from: T, to: T) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::Domain("smooth step needs t1 > t0".into()));
        }
        // from + (to - from) * (3 s² - 2 s³) with s = (t - t0) / (t1 - t0),
        // expanded into absolute powers of t.
        let h = t1 - t0;
        let d = to - from;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let a2 = three * d / (h * h);
        let a3 = -two * d / (h * h * h);
        // a2 (t - t0)² + a3 (t - t0)³
        let c0 = from + a2 * t0 * t0 - a3 * t0 * t0 * t0;
        let c1 = -two * a2 * t0 + three * a3 * t0 * t0;
        let c2 = a2 - three * a3 * t0;
        let c3 = a3;
        Self::new(from, vec![(t0, vec![c0, c1, c2, c3]), (t1, vec![to])])
    }

    /// Piecewise cubic Hermite interpolant of `scale * exp(rate * t)` on
    /// `[0, horizon]` with pieces of length `piece_len`; continued linearly
    /// with the final slope past the horizon.
    pub fn exponential_ramp(scale: T, rate: T, horizon: T, piece_len: T) -> Result<Self> {
        if !(scale > T::zero() && rate > T::zero() && horizon > T::zero() && piece_len > T::zero())
        {
            return Err(Error::Domain(
                "exponential ramp parameters must be positive".into(),
            ));
        }
        let f = |t: T| scale * (rate * t).exp();
        let df = |t: T| scale * rate * (rate * t).exp();
        let pieces_n = (horizon / piece_len).ceil().to_usize().unwrap_or(1).max(1);
        let mut entries = Vec::with_capacity(pieces_n + 1);
        for i in 0..pieces_n {
            let a = piece_len * T::from_usize_lossy(i);
            let b = (a + piece_len).min(horizon);
            entries.push((a, hermite_absolute(a, b, f(a), f(b), df(a), df(b))));
        }
        let end = horizon;
        entries.push((end, vec![f(end) - df(end) * end, df(end)]));
        Self::new(scale, entries)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial<T>] {
        &self.pieces
    }

    pub fn left_value(&self) -> T {
        self.left.coeffs()[0]
    }

    /// Stored lower bound `b₀`: minimum of the left extension and the value at
    /// the start of each piece (the infimum for non-decreasing inputs).
    pub fn lower_bound(&self) -> T {
        self.lower_bound
    }

    /// Polynomial that applies at `t` (pieces are left-closed).
    #[inline]
    pub fn piece_at(&self, t: T) -> &Polynomial<T> {
        let idx = self.breakpoints.partition_point(|&bp| bp <= t);
        if idx == 0 {
            &self.left
        } else {
            &self.pieces[idx - 1]
        }
    }

    /// Value of `b` at `t ≥ 0`; right limit at a breakpoint.
    pub fn eval(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::Domain(format!("coefficient evaluated at t = {t} < 0")));
        }
        Ok(self.eval_extended(t))
    }

    /// Value at any real `t`, using the constant extension for negative times.
    #[inline]
    pub fn eval_extended(&self, t: T) -> T {
        self.piece_at(t).eval(t)
    }

    /// Classical derivative of order `k` away from breakpoints.
    pub fn derivative_extended(&self, t: T, k: usize) -> T {
        self.piece_at(t).eval_derivative(t, k)
    }

    /// Right limit minus left limit at breakpoint `index`.
    pub fn jump(&self, index: usize) -> T {
        let bp = self.breakpoints[index];
        let left = if index == 0 {
            &self.left
        } else {
            &self.pieces[index - 1]
        };
        self.pieces[index].eval(bp) - left.eval(bp)
    }

    /// Breakpoints strictly inside `(lo, hi)`.
    pub fn breakpoints_within(&self, lo: T, hi: T) -> impl Iterator<Item = T> + '_ {
        let start = self.breakpoints.partition_point(|&bp| bp <= lo);
        self.breakpoints[start..]
            .iter()
            .copied()
            .take_while(move |&bp| bp < hi)
    }

    /// Time span used by [`validate`](Self::validate): twice the last
    /// breakpoint, at least one unit past it.
    pub fn validation_horizon(&self) -> T {
        match self.breakpoints.last() {
            Some(&last) => (last * T::lit(2.0)).max(last + T::one()).max(T::one()),
            None => T::one(),
        }
    }

    /// Default validation step: 10⁻³ of the validation horizon.
    pub fn default_validation_step(&self) -> T {
        self.validation_horizon() * T::lit(1e-3)
    }

    /// Samples `b` on `[0, validation_horizon]` with spacing `grid_step`.
    pub fn validate(&self, grid_step: T) -> Result<ValidationReport<T>> {
        self.validate_on(grid_step, self.validation_horizon())
    }

    /// Samples `b` on `[0, horizon]` with spacing `grid_step` and reports
    /// positivity and monotonicity. Violations are flagged, never raised.
    pub fn validate_on(&self, grid_step: T, horizon: T) -> Result<ValidationReport<T>> {
        if !(grid_step > T::zero()) {
            return Err(Error::Domain("validation step must be positive".into()));
        }
        if !(horizon >= T::zero()) {
            return Err(Error::Domain("validation horizon must be non-negative".into()));
        }
        let count = (horizon / grid_step).floor().to_usize().unwrap_or(0) + 1;
        let mut min_value = T::infinity();
        let mut max_value = T::neg_infinity();
        let mut violations = 0usize;
        let mut first_violation = None;
        let mut prev: Option<(T, T)> = None;
        for i in 0..count {
            let t = grid_step * T::from_usize_lossy(i);
            let v = self.eval_extended(t);
            min_value = min_value.min(v);
            max_value = max_value.max(v);
            if let Some((pt, pv)) = prev {
                if v < pv {
                    violations += 1;
                    first_violation.get_or_insert(pt);
                }
            }
            prev = Some((t, v));
        }
        Ok(ValidationReport {
            samples: count,
            min_value,
            max_value,
            monotone: violations == 0,
            positive: min_value > T::zero(),
            monotonicity_violations: violations,
            first_violation,
            detected_lower_bound: min_value,
        })
    }
}

/// Cubic Hermite on `[a, b]` written in absolute powers of `t`.
fn hermite_absolute<T: Real>(a: T, b: T, fa: T, fb: T, da: T, db: T) -> Vec<T> {
    let h = b - a;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    // Local form p(s) = fa + da s + q2 s² + q3 s³ with s = t - a.
    let q2 = (three * (fb - fa) / h - two * da - db) / h;
    let q3 = (da + db - two * (fb - fa) / h) / (h * h);
    vec![
        fa - da * a + q2 * a * a - q3 * a * a * a,
        da - two * q2 * a + three * q3 * a * a,
        q2 - three * q3 * a,
        q3,
    ]
}

/// Density and wave speed of a layered medium as functions of depth `z ≥ 0`.
#[derive(Clone, Debug)]
pub struct ImpedanceProfile<T> {
    density: BreakpointFunction<T>,
    wave_speed: BreakpointFunction<T>,
}

impl<T: Real> ImpedanceProfile<T> {
    /// Both functions must be strictly positive on a dense sample of
    /// `[0, horizon]`, where the horizon extends one unit past the last
    /// breakpoint of either function.
    pub fn new(density: BreakpointFunction<T>, wave_speed: BreakpointFunction<T>) -> Result<Self> {
        let last = density
            .breakpoints()
            .iter()
            .chain(wave_speed.breakpoints())
            .copied()
            .fold(T::zero(), T::max);
        let horizon = last + T::one();
        let step = horizon * T::lit(1e-3);
        for (name, f) in [("density", &density), ("wave speed", &wave_speed)] {
            let report = f.validate_on(step, horizon)?;
            if !report.positive {
                return Err(Error::Domain(format!(
                    "{name} must be strictly positive (min sampled value {})",
                    report.min_value
                )));
            }
        }
        Ok(Self {
            density,
            wave_speed,
        })
    }

    pub fn density(&self) -> &BreakpointFunction<T> {
        &self.density
    }

    pub fn wave_speed(&self) -> &BreakpointFunction<T> {
        &self.wave_speed
    }

    /// `ζ(z) = ρ(z) c(z)`.
    pub fn impedance(&self, z: T) -> Result<T> {
        Ok(self.density.eval(z)? * self.wave_speed.eval(z)?)
    }

    pub fn travel_time(&self, z: T) -> Result<T> {
        travel_time_transform(self, z)
    }

    /// Impedance as a function of the travel-time coordinate, for profiles
    /// whose density and speed are piecewise constant. The result is the
    /// coefficient `b` of the dissipative wave equation.
    pub fn impedance_in_travel_time(&self) -> Result<BreakpointFunction<T>> {
        if self
            .density
            .pieces()
            .iter()
            .chain(self.wave_speed.pieces())
            .any(|p| p.degree() > 0)
        {
            return Err(Error::Domain(
                "impedance in travel time requires piecewise-constant density and speed".into(),
            ));
        }
        let mut depths: Vec<T> = self
            .density
            .breakpoints()
            .iter()
            .chain(self.wave_speed.breakpoints())
            .copied()
            .filter(|&z| z > T::zero())
            .collect();
        depths.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        depths.dedup();
        let left = self.impedance(T::zero())?;
        let mut entries = Vec::with_capacity(depths.len());
        for z in depths {
            entries.push((self.travel_time(z)?, vec![self.impedance(z)?]));
        }
        BreakpointFunction::new(left, entries)
    }
}

/// Travel-time coordinate `x(z) = ∫₀^z ds / c(s)`.
///
/// Constant and affine speed pieces are integrated in closed form; higher
/// degree pieces use adaptive composite Gauss–Legendre quadrature.
pub fn travel_time_transform<T: Real>(profile: &ImpedanceProfile<T>, z: T) -> Result<T> {
    if !(z >= T::zero()) {
        return Err(Error::Domain(format!("depth must be non-negative, got {z}")));
    }
    let speed = profile.wave_speed();
    let mut cuts = vec![T::zero()];
    cuts.extend(speed.breakpoints_within(T::zero(), z));
    cuts.push(z);
    let rule = GaussLegendre::new(16);
    let mut total = T::zero();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = (a + b) / T::lit(2.0);
        let poly = speed.piece_at(mid);
        total = total + integrate_reciprocal(poly, a, b, &rule)?;
    }
    Ok(total)
}

fn integrate_reciprocal<T: Real>(
    poly: &Polynomial<T>,
    a: T,
    b: T,
    rule: &GaussLegendre<T>,
) -> Result<T> {
    let ca = poly.eval(a);
    let cb = poly.eval(b);
    if !(ca > T::zero() && cb > T::zero()) {
        return Err(Error::Domain(format!(
            "wave speed must be positive on [{a}, {b}]"
        )));
    }
    match poly.degree() {
        0 => Ok((b - a) / ca),
        1 => {
            let slope = poly.coeffs()[1];
            Ok((cb / ca).ln() / slope)
        }
        _ => {
            let samples = 256;
            for i in 0..=samples {
                let s = a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(samples);
                if !(poly.eval(s) > T::zero()) {
                    return Err(Error::Domain(format!("wave speed not positive at z = {s}")));
                }
            }
            let mut panels = 4;
            let mut prev = rule.integrate_composite(a, b, panels, |s| T::one() / poly.eval(s));
            loop {
                panels *= 2;
                let next = rule.integrate_composite(a, b, panels, |s| T::one() / poly.eval(s));
                let tol = T::epsilon() * T::lit(64.0) * next.abs().max(T::one());
                if (next - prev).abs() <= tol || panels >= 1 << 14 {
                    return Ok(next);
                }
                prev = next;
            }
        }
    }
}
