//! Dissipative wave equation `u_tt − u_xx + (b'/b) u_t = 0` with an irregular,
//! time-dependent coefficient `b`, regularized by convolution with a mollifier.
//!
//! Everything numeric is generic over [`Real`]; the aliases below fix `f64`.

pub mod coefficient;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod initial_data;
pub mod mollifier;
pub mod output;
pub mod quadrature;
pub mod scalar;
pub mod solver_fd;
pub mod solver_fourier;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = solver_fd::Grid1D<f64>;
pub type Coefficient = coefficient::BreakpointFunction<f64>;
pub type Config = solver_fd::SolverConfig<f64>;
pub type Trajectory = solver_fd::Trajectory<f64>;
