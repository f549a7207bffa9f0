//! Fourth-order centered first derivative.

use super::grid::{Grid1D, MIN_NODES};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(−f_{i+2} + 8f_{i+1} − 8f_{i−1} + f_{i−2}) / (12Δx)` in the interior,
/// wrapped on periodic grids and closed with one-sided fourth-order stencils
/// on the two outer layers of bounded grids.
pub fn fd4_derivative<T: Real>(field: &[T], grid: &Grid1D<T>) -> Result<Vec<T>> {
    if field.len() != grid.len() {
        return Err(Error::Grid(format!(
            "field has {} values, grid has {} nodes",
            field.len(),
            grid.len()
        )));
    }
    if field.len() < MIN_NODES {
        return Err(Error::Grid(format!("need at least {MIN_NODES} nodes")));
    }
    let mut out = vec![T::zero(); field.len()];
    fd4_into(field, grid, T::one(), &mut out);
    Ok(out)
}

/// Writes `scale · D₄ f` into `out`. Lengths are assumed to match the grid.
pub(crate) fn fd4_into<T: Real>(f: &[T], grid: &Grid1D<T>, scale: T, out: &mut [T]) {
    let n = f.len();
    let c = scale / (T::lit(12.0) * grid.dx());
    let eight = T::lit(8.0);
    for i in 2..n - 2 {
        out[i] = c * (f[i - 2] - f[i + 2] + eight * (f[i + 1] - f[i - 1]));
    }
    if grid.is_periodic() {
        for i in [0, 1, n - 2, n - 1] {
            let at = |k: isize| f[((i as isize + k).rem_euclid(n as isize)) as usize];
            out[i] = c * (at(-2) - at(2) + eight * (at(1) - at(-1)));
        }
    } else {
        let (k25, k48, k36, k16, k3, k10, k18, k6) = (
            T::lit(25.0),
            T::lit(48.0),
            T::lit(36.0),
            T::lit(16.0),
            T::lit(3.0),
            T::lit(10.0),
            T::lit(18.0),
            T::lit(6.0),
        );
        out[0] = c * (-k25 * f[0] + k48 * f[1] - k36 * f[2] + k16 * f[3] - k3 * f[4]);
        out[1] = c * (-k3 * f[0] - k10 * f[1] + k18 * f[2] - k6 * f[3] + f[4]);
        let m = n - 1;
        out[m] = -c * (-k25 * f[m] + k48 * f[m - 1] - k36 * f[m - 2] + k16 * f[m - 3] - k3 * f[m - 4]);
        out[m - 1] =
            -c * (-k3 * f[m] - k10 * f[m - 1] + k18 * f[m - 2] - k6 * f[m - 3] + f[m - 4]);
    }
}
