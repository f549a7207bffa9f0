use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest admissible node count (the 5-point stencil plus closures).
pub const MIN_NODES: usize = 8;

/// Uniform 1-D grid. Periodic grids omit the duplicate node at `xmax`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D<T> {
    xmin: T,
    xmax: T,
    n: usize,
    periodic: bool,
}

impl<T: Real> Grid1D<T> {
    pub fn new(xmin: T, xmax: T, n: usize, periodic: bool) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Grid(format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        if !(xmax > xmin) || !xmin.is_finite() || !xmax.is_finite() {
            return Err(Error::Grid(format!("invalid interval [{xmin}, {xmax}]")));
        }
        Ok(Self { xmin, xmax, n, periodic })
    }

    pub fn periodic(xmin: T, xmax: T, n: usize) -> Result<Self> {
        Self::new(xmin, xmax, n, true)
    }

    pub fn bounded(xmin: T, xmax: T, n: usize) -> Result<Self> {
        Self::new(xmin, xmax, n, false)
    }

    /// Grid whose spacing is as close as possible to `dx`.
    pub fn with_spacing(xmin: T, xmax: T, dx: T, periodic: bool) -> Result<Self> {
        if !(dx > T::zero()) {
            return Err(Error::Grid(format!("spacing must be positive, got {dx}")));
        }
        let cells = ((xmax - xmin) / dx).round().to_usize().unwrap_or(0);
        let n = if periodic { cells } else { cells + 1 };
        Self::new(xmin, xmax, n, periodic)
    }

    pub fn xmin(&self) -> T {
        self.xmin
    }

    pub fn xmax(&self) -> T {
        self.xmax
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn span(&self) -> T {
        self.xmax - self.xmin
    }

    pub fn dx(&self) -> T {
        let cells = if self.periodic { self.n } else { self.n - 1 };
        self.span() / T::from_usize_lossy(cells)
    }

    #[inline]
    pub fn node(&self, i: usize) -> T {
        self.xmin + self.dx() * T::from_usize_lossy(i)
    }

    pub fn nodes(&self) -> Vec<T> {
        let dx = self.dx();
        (0..self.n)
            .map(|i| self.xmin + dx * T::from_usize_lossy(i))
            .collect()
    }

    /// Same interval with twice the resolution.
    pub fn refined(&self) -> Self {
        let n = if self.periodic { 2 * self.n } else { 2 * self.n - 1 };
        Self { n, ..*self }
    }

    /// Same interval with the spacing multiplied by `factor` (rounded).
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        let factor = factor.max(1);
        let n = if self.periodic {
            self.n / factor
        } else {
            (self.n - 1) / factor + 1
        };
        Self::new(self.xmin, self.xmax, n, self.periodic)
    }

    /// Quadrature weights for the discrete L² inner product: `Δx` on periodic
    /// grids, trapezoid weights otherwise.
    #[inline]
    pub fn weight(&self, i: usize) -> T {
        if !self.periodic && (i == 0 || i + 1 == self.n) {
            self.dx() / T::lit(2.0)
        } else {
            self.dx()
        }
    }
}

/// Discrete state `(p, u)` of the first-order system.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair<T> {
    pub p: Vec<T>,
    pub u: Vec<T>,
}

impl<T: Real> FieldPair<T> {
    pub fn new(p: Vec<T>, u: Vec<T>) -> Result<Self> {
        if p.len() != u.len() {
            return Err(Error::Grid(format!(
                "field lengths differ: p has {}, u has {}",
                p.len(),
                u.len()
            )));
        }
        Ok(Self { p, u })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            p: vec![T::zero(); n],
            u: vec![T::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.p.iter().chain(&self.u).all(|v| v.is_finite())
    }
}
