//! Classical four-stage Runge–Kutta.

use crate::scalar::Real;

/// State vector that RK4 can combine linearly.
pub trait OdeState<T>: Clone {
    /// `self += factor * other`.
    fn add_scaled(&mut self, factor: T, other: &Self);
    fn all_finite(&self) -> bool;
}

/// A stage produced a non-finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonFiniteStage {
    /// 1-based stage index; 5 is the combined update.
    pub stage: usize,
}

/// One RK4 step of `y' = rhs(y, t)` with stage times `t, t+dt/2, t+dt/2, t+dt`.
///
/// Negative `dt` integrates backwards.
pub fn rk4_step<T, S, F>(state: &S, t: T, dt: T, mut rhs: F) -> Result<S, NonFiniteStage>
where
    T: Real,
    S: OdeState<T>,
    F: FnMut(&S, T) -> S,
{
    let half = dt / T::lit(2.0);
    let check = |s: &S, stage: usize| {
        if s.all_finite() {
            Ok(())
        } else {
            Err(NonFiniteStage { stage })
        }
    };

    let k1 = rhs(state, t);
    check(&k1, 1)?;
    let mut y = state.clone();
    y.add_scaled(half, &k1);
    let k2 = rhs(&y, t + half);
    check(&k2, 2)?;
    let mut y = state.clone();
    y.add_scaled(half, &k2);
    let k3 = rhs(&y, t + half);
    check(&k3, 3)?;
    let mut y = state.clone();
    y.add_scaled(dt, &k3);
    let k4 = rhs(&y, t + dt);
    check(&k4, 4)?;

    let sixth = dt / T::lit(6.0);
    let third = dt / T::lit(3.0);
    let mut out = state.clone();
    out.add_scaled(sixth, &k1);
    out.add_scaled(third, &k2);
    out.add_scaled(third, &k3);
    out.add_scaled(sixth, &k4);
    check(&out, 5)?;
    Ok(out)
}

impl<T: Real> OdeState<T> for T {
    fn add_scaled(&mut self, factor: T, other: &Self) {
        *self = *self + factor * *other;
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> OdeState<T> for super::grid::FieldPair<T> {
    fn add_scaled(&mut self, factor: T, other: &Self) {
        for (a, b) in self.p.iter_mut().zip(&other.p) {
            *a = *a + factor * *b;
        }
        for (a, b) in self.u.iter_mut().zip(&other.u) {
            *a = *a + factor * *b;
        }
    }
    fn all_finite(&self) -> bool {
        super::grid::FieldPair::all_finite(self)
    }
}
