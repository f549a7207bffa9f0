//! Cauchy data for the regularized problem.
//!
//! The displacement `u(0, x) = f(x)` is paired with `u_t(0, x) = −f'(x) / b_ε(0)`,
//! which makes the pulse a right-mover while `b` is constant. In the
//! first-order system this is the same as starting from `p(0) = u(0) = f`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver_fd::{fd4_derivative, Grid1D};

/// Pulse profile used for the initial displacement.
#[derive(Clone, Debug, PartialEq)]
pub enum PulseSpec<T> {
    /// `exp(−(x − center)² / width)`.
    Gaussian { center: T, width: T },
    /// `(1/π) · scale / (x² + scale²)`, unit mass, tends to δ as `scale → 0`.
    Lorentzian { scale: T },
    /// Values given directly on the grid nodes.
    Samples(Vec<T>),
}

impl<T: Real> PulseSpec<T> {
    /// `Gaussian { center: 0, width: 0.3 }`.
    pub fn paper_gaussian() -> Self {
        PulseSpec::Gaussian {
            center: T::zero(),
            width: T::lit(0.3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PulseSpec::Gaussian { width, center } => {
                if !(*width > T::zero()) || !center.is_finite() {
                    return Err(Error::Domain(format!("Gaussian width must be positive, got {width}")));
                }
            }
            PulseSpec::Lorentzian { scale } => {
                if !(*scale > T::zero()) {
                    return Err(Error::Domain(format!("Lorentzian scale must be positive, got {scale}")));
                }
            }
            PulseSpec::Samples(values) => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain("sampled pulse has non-finite values".into()));
                }
            }
        }
        Ok(())
    }

    /// `f(x)` for the analytic kinds.
    pub fn value(&self, x: T) -> Option<T> {
        match *self {
            PulseSpec::Gaussian { center, width } => {
                let d = x - center;
                Some((-(d * d) / width).exp())
            }
            PulseSpec::Lorentzian { scale } => {
                Some(scale / (T::PI() * (x * x + scale * scale)))
            }
            PulseSpec::Samples(_) => None,
        }
    }

    /// `f'(x)` for the analytic kinds.
    pub fn derivative(&self, x: T) -> Option<T> {
        let two = T::lit(2.0);
        match *self {
            PulseSpec::Gaussian { center, width } => {
                let d = x - center;
                Some(-two * d / width * (-(d * d) / width).exp())
            }
            PulseSpec::Lorentzian { scale } => {
                let q = x * x + scale * scale;
                Some(-two * x * scale / (T::PI() * q * q))
            }
            PulseSpec::Samples(_) => None,
        }
    }
}

/// Samples `f` on the grid nodes.
pub fn sample_u0<T: Real>(spec: &PulseSpec<T>, grid: &Grid1D<T>) -> Result<Vec<T>> {
    spec.validate()?;
    match spec {
        PulseSpec::Samples(values) => {
            if values.len() != grid.len() {
                return Err(Error::Grid(format!(
                    "sampled pulse has {} values, grid has {} nodes",
                    values.len(),
                    grid.len()
                )));
            }
            Ok(values.clone())
        }
        _ => Ok(grid
            .nodes()
            .into_iter()
            .map(|x| spec.value(x).expect("analytic pulse"))
            .collect()),
    }
}

/// Samples `−f'(x) / b_ε(0)`, using the analytic derivative when one exists
/// and the fourth-order stencil for sampled pulses.
pub fn sample_u1<T: Real>(spec: &PulseSpec<T>, grid: &Grid1D<T>, b_eps_at_0: T) -> Result<Vec<T>> {
    if !(b_eps_at_0 > T::zero()) {
        return Err(Error::Domain(format!(
            "b_eps(0) must be positive, got {b_eps_at_0}"
        )));
    }
    let inv = -T::one() / b_eps_at_0;
    let slope = match spec {
        PulseSpec::Samples(_) => fd4_derivative(&sample_u0(spec, grid)?, grid)?,
        _ => {
            spec.validate()?;
            grid.nodes()
                .into_iter()
                .map(|x| spec.derivative(x).expect("analytic pulse"))
                .collect()
        }
    };
    Ok(slope.into_iter().map(|d| inv * d).collect())
}
