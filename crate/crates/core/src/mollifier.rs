//! Friedrichs mollifiers and convolution regularization of coefficients.
//!
//! The bump `ψ(τ) = exp(α / (τ² − 1)) / C` on `|τ| < 1` is scaled as
//! `ψ_ε(t) = ψ(t/ε) / ε`, and a jump coefficient `b` is replaced by the smooth
//! net `b_ε = b ∗ ψ_ε`. Derivatives are convolutions with derivatives of the
//! mollifier, `∂ᵏ b_ε = ε⁻ᵏ ∫ b(t − ετ) ψ⁽ᵏ⁾(τ) dτ`, never finite differences.
//!
//! Integrals over the bump use order-16 Gauss–Legendre panels on a fixed mesh
//! that is graded toward the flat endpoints `±1`, split additionally at the
//! images `(t − t_j)/ε` of the coefficient breakpoints. When the support
//! window misses every breakpoint the covering piece is a polynomial of degree
//! at most three and the convolution is evaluated exactly from the even
//! moments of `ψ`.

use rayon::prelude::*;

use crate::coefficient::BreakpointFunction;
use crate::error::{Error, Result};
use crate::fit::{fit_log_log, LineFit};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Highest derivative order of `b_ε` that can be evaluated.
pub const MAX_DERIVATIVE_ORDER: usize = 2;

const QUADRATURE_ORDER: usize = 16;

/// Panel edges on `[0, 1]`, mirrored to `[-1, 0]`.
const HALF_MESH: [f64; 11] = [
    0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 0.9375, 0.96875, 1.0,
];

fn graded_mesh<T: Real>() -> Vec<T> {
    let mut mesh: Vec<T> = HALF_MESH.iter().rev().map(|&v| T::lit(-v)).collect();
    mesh.pop();
    mesh.extend(HALF_MESH.iter().map(|&v| T::lit(v)));
    mesh
}

fn bisected_mesh<T: Real>(levels: usize) -> Vec<T> {
    let mut mesh = graded_mesh::<T>();
    for _ in 0..levels {
        let mut finer = Vec::with_capacity(mesh.len() * 2);
        for w in mesh.windows(2) {
            finer.push(w[0]);
            finer.push((w[0] + w[1]) / T::lit(2.0));
        }
        finer.push(*mesh.last().expect("non-empty mesh"));
        mesh = finer;
    }
    mesh
}

/// `exp(α/(τ²−1))` and its first two derivatives, unnormalized.
#[inline]
fn bump_derivative<T: Real>(sharpness: T, tau: T, k: usize) -> T {
    let one = T::one();
    let q = tau * tau - one;
    if !(q < T::zero()) {
        return T::zero();
    }
    let g = sharpness / q;
    let e = g.exp();
    if e == T::zero() {
        return T::zero();
    }
    let two = T::lit(2.0);
    match k {
        0 => e,
        1 => {
            let g1 = -two * sharpness * tau / (q * q);
            e * g1
        }
        2 => {
            let g1 = -two * sharpness * tau / (q * q);
            let g2 = sharpness * (T::lit(6.0) * tau * tau + two) / (q * q * q);
            e * (g1 * g1 + g2)
        }
        _ => panic!("mollifier derivatives above order {MAX_DERIVATIVE_ORDER} are not supported"),
    }
}

/// `∫₋₁¹ exp(1/(τ²−1)) dτ`, refined until successive estimates differ by
/// less than `tol`.
pub fn normalization_constant<T: Real>(tol: T) -> T {
    bump_integral(T::one(), tol)
}

fn bump_integral<T: Real>(sharpness: T, tol: T) -> T {
    let rule = GaussLegendre::<T>::new(QUADRATURE_ORDER);
    let one = T::one();
    let mut prev = rule.integrate_on_mesh(-one, one, &bisected_mesh::<T>(0), |t| {
        bump_derivative(sharpness, t, 0)
    });
    for level in 1..8 {
        let next = rule.integrate_on_mesh(-one, one, &bisected_mesh::<T>(level), |t| {
            bump_derivative(sharpness, t, 0)
        });
        if (next - prev).abs() <= tol {
            return next;
        }
        prev = next;
    }
    prev
}

/// Even, smooth, compactly supported bump with unit mass on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct Mollifier<T> {
    sharpness: T,
    normalization: T,
    second_moment: T,
    rule: GaussLegendre<T>,
    mesh: Vec<T>,
}

impl<T: Real> Mollifier<T> {
    /// `ψ(τ) = exp(1/(τ² − 1)) / C` with `C ≈ 0.443994`.
    pub fn paper() -> Self {
        Self::with_sharpness(T::one()).expect("unit sharpness")
    }

    /// `ψ(τ) ∝ exp(α/(τ² − 1))`. Larger `α` concentrates the mass near 0.
    pub fn with_sharpness(sharpness: T) -> Result<Self> {
        if !(sharpness > T::zero() && sharpness.is_finite()) {
            return Err(Error::Domain(format!(
                "mollifier sharpness must be positive, got {sharpness}"
            )));
        }
        let rule = GaussLegendre::new(QUADRATURE_ORDER);
        let mesh = graded_mesh::<T>();
        let one = T::one();
        let normalization = bump_integral(sharpness, T::epsilon());
        let second_moment = rule.integrate_on_mesh(-one, one, &mesh, |t| {
            t * t * bump_derivative(sharpness, t, 0)
        }) / normalization;
        Ok(Self {
            sharpness,
            normalization,
            second_moment,
            rule,
            mesh,
        })
    }

    pub fn sharpness(&self) -> T {
        self.sharpness
    }

    /// The constant `C` with `∫ψ = 1`.
    pub fn normalization(&self) -> T {
        self.normalization
    }

    /// `∫ τ² ψ(τ) dτ`. Odd moments vanish since `ψ` is even.
    pub fn second_moment(&self) -> T {
        self.second_moment
    }

    #[inline]
    pub fn eval(&self, tau: T) -> T {
        bump_derivative(self.sharpness, tau, 0) / self.normalization
    }

    /// `ψ⁽ᵏ⁾(τ)` for `k ≤ 2`.
    #[inline]
    pub fn eval_derivative(&self, tau: T, k: usize) -> T {
        bump_derivative(self.sharpness, tau, k) / self.normalization
    }

    /// `ψ_ε(t) = ψ(t/ε) / ε`, supported on `[-ε, ε]`.
    pub fn eval_scaled(&self, epsilon: T, t: T) -> T {
        self.eval(t / epsilon) / epsilon
    }

    /// Integrates `f(τ) ψ⁽ᵏ⁾(τ)` over `[lo, hi] ⊂ [-1, 1]`.
    pub fn integrate_against<F: FnMut(T) -> T>(&self, lo: T, hi: T, k: usize, mut f: F) -> T {
        self.rule
            .integrate_on_mesh(lo, hi, &self.mesh, |tau| f(tau) * self.eval_derivative(tau, k))
    }

    /// Total mass `∫ ψ_ε` computed in the physical variable.
    pub fn scaled_mass(&self, epsilon: T) -> T {
        let mesh: Vec<T> = self.mesh.iter().map(|&m| m * epsilon).collect();
        self.rule
            .integrate_on_mesh(-epsilon, epsilon, &mesh, |t| self.eval_scaled(epsilon, t))
    }
}

/// Smooth coefficient `b_ε = b ∗ ψ_ε` with derivatives.
#[derive(Clone, Debug)]
pub struct RegularizedCoefficient<T> {
    base: BreakpointFunction<T>,
    mollifier: Mollifier<T>,
    epsilon: T,
}

/// Regularizes `b` with the mollifier `m` at scale `epsilon`.
pub fn regularize<T: Real>(
    b: &BreakpointFunction<T>,
    m: &Mollifier<T>,
    epsilon: T,
) -> Result<RegularizedCoefficient<T>> {
    RegularizedCoefficient::new(b.clone(), m.clone(), epsilon)
}

impl<T: Real> RegularizedCoefficient<T> {
    pub fn new(base: BreakpointFunction<T>, mollifier: Mollifier<T>, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon.is_finite()) {
            return Err(Error::Domain(format!(
                "mollifier scale must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            base,
            mollifier,
            epsilon,
        })
    }

    pub fn base(&self) -> &BreakpointFunction<T> {
        &self.base
    }

    pub fn mollifier(&self) -> &Mollifier<T> {
        &self.mollifier
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// `b_ε(t)`.
    #[inline]
    pub fn value(&self, t: T) -> T {
        self.derivative_of_order(t, 0)
    }

    /// `b'_ε(t)`.
    #[inline]
    pub fn derivative(&self, t: T) -> T {
        self.derivative_of_order(t, 1)
    }

    /// `∂ᵏ b_ε(t) = ε⁻ᵏ ∫ b(t − ετ) ψ⁽ᵏ⁾(τ) dτ` for `k ≤ 2`.
    ///
    /// Inside the window `b` is split into the piece at its left end plus one
    /// one-sided term per breakpoint `s_j`, carrying the difference `D_j` of
    /// the pieces meeting there. The smooth part has a closed form (pieces
    /// have degree ≤ 3, odd moments vanish); each jump term is
    /// `ε⁻ᵏ ∫_{−1}^{τ_j} D_j(t − ετ) ψ⁽ᵏ⁾(τ) dτ` with `τ_j = (t − s_j)/ε`.
    pub fn derivative_of_order(&self, t: T, k: usize) -> T {
        assert!(
            k <= MAX_DERIVATIVE_ORDER,
            "derivative order {k} exceeds {MAX_DERIVATIVE_ORDER}"
        );
        let eps = self.epsilon;
        let mut below = self.base.piece_at(t - eps);
        let smooth = below.eval_derivative(t, k)
            + T::lit(0.5) * eps * eps * self.mollifier.second_moment * below.eval_derivative(t, k + 2);
        let mut jumps = T::zero();
        for bp in self.base.breakpoints_within(t - eps, t + eps) {
            let above = self.base.piece_at(bp);
            let tau = (t - bp) / eps;
            let term = self.mollifier.integrate_against(-T::one(), tau, k, |x| {
                let s = t - eps * x;
                above.eval(s) - below.eval(s)
            });
            jumps = jumps + term;
            below = above;
        }
        smooth + jumps / eps.powi(k as i32)
    }

    /// Dissipation ratio `b'_ε / b_ε`.
    pub fn dissipation_ratio(&self, t: T) -> T {
        self.derivative(t) / self.value(t)
    }
}

/// Evaluable time-dependent coefficient used by the solvers.
pub trait TimeCoefficient<T>: Send + Sync {
    fn value(&self, t: T) -> T;
    fn derivative(&self, t: T) -> T;
}

impl<T: Real> TimeCoefficient<T> for RegularizedCoefficient<T> {
    fn value(&self, t: T) -> T {
        RegularizedCoefficient::value(self, t)
    }
    fn derivative(&self, t: T) -> T {
        RegularizedCoefficient::derivative(self, t)
    }
}

/// The unregularized coefficient, usable when it is at least continuous.
impl<T: Real> TimeCoefficient<T> for BreakpointFunction<T> {
    fn value(&self, t: T) -> T {
        self.eval_extended(t)
    }
    fn derivative(&self, t: T) -> T {
        self.derivative_extended(t, 1)
    }
}

/// Fitted power law, or the degenerate case of an identically vanishing net.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalingExponent<T> {
    Fitted(LineFit<T>),
    IdenticallyZero,
}

impl<T: Real> ScalingExponent<T> {
    pub fn exponent(&self) -> Option<T> {
        match self {
            ScalingExponent::Fitted(fit) => Some(fit.slope),
            ScalingExponent::IdenticallyZero => None,
        }
    }

    fn from_samples(eps: &[T], values: &[T]) -> Result<Self> {
        let distinct = {
            let mut e: Vec<T> = eps.to_vec();
            e.sort_by(|a, b| a.partial_cmp(b).expect("finite epsilon"));
            e.dedup();
            e.len()
        };
        if distinct < 2 {
            return Err(Error::Fit(format!(
                "need at least two distinct epsilon values, got {distinct}"
            )));
        }
        if values.iter().all(|v| *v == T::zero()) {
            return Ok(ScalingExponent::IdenticallyZero);
        }
        let (xs, ys): (Vec<T>, Vec<T>) = eps
            .iter()
            .zip(values)
            .filter(|(_, v)| **v > T::zero())
            .map(|(e, v)| (*e, *v))
            .unzip();
        Ok(ScalingExponent::Fitted(fit_log_log(&xs, &ys)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeratenessRow<T> {
    pub epsilon: T,
    pub sup_value: T,
    /// Sample time where the supremum was attained.
    pub argmax: T,
}

/// Measured growth of `sup |∂ᵏ b_ε|` as `ε → 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeratenessReport<T> {
    pub derivative_order: usize,
    pub window: (T, T),
    pub rows: Vec<ModeratenessRow<T>>,
    pub exponent: ScalingExponent<T>,
}

/// Sample times in `window`: a uniform grid plus dense clusters across every
/// breakpoint's `ε`-neighbourhood, where the suprema of the derivatives sit.
pub fn window_samples<T: Real>(b: &BreakpointFunction<T>, epsilon: T, window: (T, T)) -> Vec<T> {
    let (a, z) = window;
    const COARSE: usize = 2000;
    const DENSE: usize = 400;
    let mut samples: Vec<T> = (0..=COARSE)
        .map(|i| a + (z - a) * T::from_usize_lossy(i) / T::from_usize_lossy(COARSE))
        .collect();
    for bp in b.breakpoints_within(a - epsilon, z + epsilon) {
        for i in 0..=DENSE {
            let t = bp - epsilon
                + T::lit(2.0) * epsilon * T::from_usize_lossy(i) / T::from_usize_lossy(DENSE);
            if t >= a && t <= z {
                samples.push(t);
            }
        }
    }
    samples.sort_by(|x, y| x.partial_cmp(y).expect("finite samples"));
    samples.dedup();
    samples
}

fn sup_over<T: Real, F: Fn(T) -> T>(samples: &[T], f: F) -> (T, T) {
    samples
        .iter()
        .map(|&t| (f(t).abs(), t))
        .fold((T::zero(), samples[0]), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        })
}

/// Fits `log sup_t |∂ᵏ b_ε(t)|` against `log ε` over `window`.
pub fn moderateness_scan<T: Real>(
    b: &BreakpointFunction<T>,
    m: &Mollifier<T>,
    derivative_order: usize,
    eps_list: &[T],
    window: (T, T),
) -> Result<ModeratenessReport<T>> {
    if derivative_order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!(
            "derivative order must be at most {MAX_DERIVATIVE_ORDER}, got {derivative_order}"
        )));
    }
    if !(window.1 > window.0) {
        return Err(Error::Domain("empty time window".into()));
    }
    let rows: Vec<ModeratenessRow<T>> = eps_list
        .par_iter()
        .map(|&epsilon| {
            let reg = regularize(b, m, epsilon)?;
            let samples = window_samples(b, epsilon, window);
            let (sup_value, argmax) =
                sup_over(&samples, |t| reg.derivative_of_order(t, derivative_order));
            Ok(ModeratenessRow {
                epsilon,
                sup_value,
                argmax,
            })
        })
        .collect::<Result<_>>()?;
    let eps: Vec<T> = rows.iter().map(|r| r.epsilon).collect();
    let sups: Vec<T> = rows.iter().map(|r| r.sup_value).collect();
    let exponent = ScalingExponent::from_samples(&eps, &sups)?;
    Ok(ModeratenessReport {
        derivative_order,
        window,
        rows,
        exponent,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityRow<T> {
    pub epsilon: T,
    pub sup_difference: T,
    pub argmax: T,
}

/// `sup_t |b_{ε,m1} − b_{ε,m2}|` per `ε`, with a fitted decay exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityTable<T> {
    pub window: (T, T),
    pub rows: Vec<SensitivityRow<T>>,
    pub exponent: ScalingExponent<T>,
    /// The difference at the smallest `ε` is still more than half of the
    /// difference at the largest `ε`.
    pub plateau: bool,
}

/// Compares two regularizations of the same coefficient.
pub fn mollifier_sensitivity<T: Real>(
    b: &BreakpointFunction<T>,
    m1: &Mollifier<T>,
    m2: &Mollifier<T>,
    eps_list: &[T],
    window: (T, T),
) -> Result<SensitivityTable<T>> {
    if !(window.1 > window.0) {
        return Err(Error::Domain("empty time window".into()));
    }
    let rows: Vec<SensitivityRow<T>> = eps_list
        .par_iter()
        .map(|&epsilon| {
            let r1 = regularize(b, m1, epsilon)?;
            let r2 = regularize(b, m2, epsilon)?;
            let samples = window_samples(b, epsilon, window);
            let (sup_difference, argmax) = sup_over(&samples, |t| r1.value(t) - r2.value(t));
            Ok(SensitivityRow {
                epsilon,
                sup_difference,
                argmax,
            })
        })
        .collect::<Result<_>>()?;
    let eps: Vec<T> = rows.iter().map(|r| r.epsilon).collect();
    let diffs: Vec<T> = rows.iter().map(|r| r.sup_difference).collect();
    let exponent = ScalingExponent::from_samples(&eps, &diffs)?;
    let plateau = {
        let largest = rows
            .iter()
            .max_by(|a, b| a.epsilon.partial_cmp(&b.epsilon).expect("finite"));
        let smallest = rows
            .iter()
            .min_by(|a, b| a.epsilon.partial_cmp(&b.epsilon).expect("finite"));
        match (largest, smallest) {
            (Some(l), Some(s)) => {
                l.sup_difference > T::zero()
                    && s.sup_difference > T::lit(0.5) * l.sup_difference
            }
            _ => false,
        }
    };
    Ok(SensitivityTable {
        window,
        rows,
        exponent,
        plateau,
    })
}

/// Row of a coefficient overlay table: `(t, b, b_ε, b'_ε)`.
pub type CoefficientSample<T> = (T, T, T, T);

/// Samples `b`, `b_ε` and `b'_ε` at `count` uniform points of `[t0, t1]`.
pub fn sample_regularized<T: Real>(
    reg: &RegularizedCoefficient<T>,
    t0: T,
    t1: T,
    count: usize,
) -> Vec<CoefficientSample<T>> {
    let count = count.max(2);
    (0..count)
        .map(|i| {
            let t = t0 + (t1 - t0) * T::from_usize_lossy(i) / T::from_usize_lossy(count - 1);
            (
                t,
                reg.base().eval_extended(t),
                reg.value(t),
                reg.derivative(t),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Adaptive Simpson oracle, independent of the Gauss–Legendre path.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64 + Copy>(
            f: F,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    fn raw_bump(t: f64) -> f64 {
        if t.abs() < 1.0 {
            (1.0 / (t * t - 1.0)).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn normalization_matches_reference() {
        let c = normalization_constant(1e-6f64);
        assert!((c - 0.443994).abs() < 1e-4);
        let oracle = simpson(raw_bump, -1.0, 1.0, 1e-14);
        assert!((c - oracle).abs() < 1e-12, "{c} vs {oracle}");
        let m = Mollifier::<f64>::paper();
        assert!((m.normalization() - c).abs() < 1e-14);
    }

    #[test]
    fn mollifier_mass_symmetry_and_peak() {
        let m = Mollifier::<f64>::paper();
        let mass = simpson(|t| m.eval(t), -1.0, 1.0, 1e-14);
        assert!((mass - 1.0).abs() < 1e-12);
        for t in [0.1, 0.5, 0.93, 0.999] {
            assert_eq!(m.eval(t), m.eval(-t));
            assert!(m.eval(t) >= 0.0);
        }
        assert_eq!(m.eval(1.0), 0.0);
        assert_eq!(m.eval(-1.5), 0.0);
        let peak = (-1.0f64).exp() / normalization_constant(1e-12);
        assert!((m.eval(0.0) - peak).abs() < 1e-14);
        assert!((m.eval(0.0) - 0.828569).abs() < 1e-6);
    }

    #[test]
    fn scaled_mollifier() {
        let m = Mollifier::<f64>::paper();
        let eps = 0.5;
        assert!((m.eval_scaled(eps, 0.0) - m.eval(0.0) / eps).abs() < 1e-15);
        assert_eq!(m.eval_scaled(eps, 1.1 * eps), 0.0);
        assert!((m.scaled_mass(eps) - 1.0).abs() < 1e-13);
        assert!((m.scaled_mass(1e-3) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mollifier_derivatives_match_finite_differences() {
        let m = Mollifier::<f64>::paper();
        let h = 1e-5;
        for t in [-0.7, -0.2, 0.0, 0.4, 0.85] {
            let fd1 = (m.eval(t + h) - m.eval(t - h)) / (2.0 * h);
            assert!((m.eval_derivative(t, 1) - fd1).abs() < 1e-7, "t = {t}");
            let fd2 = (m.eval_derivative(t + h, 1) - m.eval_derivative(t - h, 1)) / (2.0 * h);
            assert!((m.eval_derivative(t, 2) - fd2).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn constant_is_a_fixed_point() {
        let b = BreakpointFunction::constant(3.0);
        let m = Mollifier::paper();
        for eps in [0.5, 0.01] {
            let reg = regularize(&b, &m, eps).unwrap();
            for t in [0.0, 1.3, 7.0] {
                assert_eq!(reg.value(t), 3.0);
                assert_eq!(reg.derivative(t), 0.0);
            }
        }
    }

    #[test]
    fn locality_away_from_the_jump() {
        let b = BreakpointFunction::paper();
        let m = Mollifier::paper();
        let reg = regularize(&b, &m, 0.5).unwrap();
        assert_eq!(reg.value(3.0), 1.0);
        assert_eq!(reg.value(7.0), b.eval(7.0).unwrap());
        assert_eq!(reg.derivative(7.0), 0.1);
    }

    #[test]
    fn paper_jump_at_small_epsilon() {
        let b = BreakpointFunction::<f64>::paper();
        let m = Mollifier::paper();
        let eps = 0.01;
        let reg = regularize(&b, &m, eps).unwrap();
        // Jump + ramp decomposition:
        // b = 1 + H(t-5) (t/10 + 1/2), b' = δ(t-5) + H(t-5)/10,
        // integrated against ψ_ε with an adaptive Simpson oracle.
        let c = simpson(raw_bump, -1.0, 1.0, 1e-15);
        let psi = |tau: f64| raw_bump(tau) / c;
        let t = 5.0;
        let upper = (t - 5.0) / eps; // τ below this gives s = t - ετ ≥ 5
        let ramp = simpson(|tau| ((t - eps * tau) / 10.0 + 0.5) * psi(tau), -1.0, upper, 1e-15);
        let heaviside = simpson(psi, -1.0, upper, 1e-15);
        let value_oracle = 1.0 + ramp;
        let derivative_oracle = psi(upper) / eps + heaviside / 10.0;
        assert!((reg.value(t) - value_oracle).abs() < 1e-12);
        assert!((reg.derivative(t) - derivative_oracle).abs() < 1e-9);
        assert!((reg.value(t) - 1.5).abs() < 0.01);
        assert!((reg.derivative(t) - 82.9).abs() < 0.1);
    }

    #[test]
    fn derivative_agrees_with_centered_difference() {
        let b = BreakpointFunction::<f64>::paper();
        let m = Mollifier::paper();
        let reg = regularize(&b, &m, 0.3).unwrap();
        for t in [4.8, 4.95, 5.0, 5.1, 5.25] {
            let mut errors = Vec::new();
            for h in [1e-2, 5e-3] {
                let fd = (reg.value(t + h) - reg.value(t - h)) / (2.0 * h);
                errors.push((reg.derivative(t) - fd).abs());
            }
            // Second order: halving h cuts the error by about four.
            let ratio = errors[0] / errors[1];
            assert!(ratio > 3.5 && ratio < 4.5, "t = {t}: ratio {ratio}");
            let fd2 =
                (reg.derivative(t + 1e-4) - reg.derivative(t - 1e-4)) / 2e-4;
            assert!((reg.derivative_of_order(t, 2) - fd2).abs() < 1e-4 * fd2.abs().max(1.0));
        }
    }

    #[test]
    fn moderateness_examples() {
        let m = Mollifier::<f64>::paper();
        let eps: Vec<f64> = (2..=8).map(|k| 2f64.powi(-k)).collect();

        let flat = moderateness_scan(&BreakpointFunction::constant(3.0), &m, 1, &eps, (0.0, 10.0))
            .unwrap();
        assert_eq!(flat.exponent, ScalingExponent::IdenticallyZero);

        let jump =
            moderateness_scan(&BreakpointFunction::paper(), &m, 1, &eps, (0.0, 10.0)).unwrap();
        let e = jump.exponent.exponent().unwrap();
        assert!((e + 1.0).abs() < 0.1, "exponent {e}");

        let ramp = moderateness_scan(&BreakpointFunction::linear_ramp(1.0, 0.1), &m, 1, &eps, (0.0, 10.0))
            .unwrap();
        let e = ramp.exponent.exponent().unwrap();
        assert!(e.abs() < 0.1, "exponent {e}");

        assert!(matches!(
            moderateness_scan(&BreakpointFunction::paper(), &m, 1, &[0.1, 0.1], (0.0, 10.0)),
            Err(Error::Fit(_))
        ));
        assert!(moderateness_scan(&BreakpointFunction::paper(), &m, 3, &eps, (0.0, 10.0)).is_err());
    }

    #[test]
    fn sensitivity_examples() {
        let m1 = Mollifier::<f64>::paper();
        let m2 = Mollifier::with_sharpness(2.0).unwrap();
        let eps = [0.25, 0.125, 0.0625, 0.03125];

        let same = mollifier_sensitivity(&BreakpointFunction::paper(), &m1, &m1, &eps, (0.0, 10.0))
            .unwrap();
        assert!(same.rows.iter().all(|r| r.sup_difference == 0.0));
        assert_eq!(same.exponent, ScalingExponent::IdenticallyZero);

        let smooth = BreakpointFunction::quadratic(1.0, 0.01);
        let table = mollifier_sensitivity(&smooth, &m1, &m2, &eps, (1.0, 10.0)).unwrap();
        let e = table.exponent.exponent().unwrap();
        assert!(e >= 2.0 - 1e-9, "exponent {e}");
        assert!(!table.plateau);

        let jump = mollifier_sensitivity(&BreakpointFunction::paper(), &m1, &m2, &eps, (0.0, 10.0))
            .unwrap();
        assert!(jump.plateau);
        for row in &jump.rows {
            assert!((row.argmax - 5.0).abs() <= row.epsilon);
        }
    }

    proptest! {
        #[test]
        fn positivity_and_monotonicity(eps in 0.005f64..1.0, start in 0.0f64..12.0) {
            let b = BreakpointFunction::paper();
            let reg = regularize(&b, &Mollifier::paper(), eps).unwrap();
            let mut prev = reg.value(start);
            for i in 1..200 {
                let t = start + i as f64 * eps / 50.0;
                let v = reg.value(t);
                prop_assert!(v >= b.lower_bound() - 1e-12);
                prop_assert!(v >= prev - 1e-10);
                prev = v;
            }
        }

        #[test]
        fn scaled_mass_is_one(eps in 1e-4f64..2.0) {
            let m = Mollifier::paper();
            prop_assert!((m.scaled_mass(eps) - 1.0).abs() < 1e-12);
        }
    }
}
