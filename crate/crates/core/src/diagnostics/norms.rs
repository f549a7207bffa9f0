use crate::scalar::Real;
use crate::solver_fd::{FieldPair, Grid1D};

/// Discrete L² norm with the grid's quadrature weights.
pub fn l2_norm<T: Real>(field: &[T], grid: &Grid1D<T>) -> T {
    field
        .iter()
        .enumerate()
        .map(|(i, v)| *v * *v * grid.weight(i))
        .sum::<T>()
        .sqrt()
}

/// `max |f|`; zero for an empty slice.
pub fn sup_norm<T: Real>(field: &[T]) -> T {
    field.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// `Σ (p² + u²) w_i`.
pub fn energy<T: Real>(state: &FieldPair<T>, grid: &Grid1D<T>) -> T {
    state
        .p
        .iter()
        .zip(&state.u)
        .enumerate()
        .map(|(i, (p, u))| (*p * *p + *u * *u) * grid.weight(i))
        .sum()
}

/// L² distance between two fields on the same grid.
pub fn l2_distance<T: Real>(a: &[T], b: &[T], grid: &Grid1D<T>) -> T {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| (*x - *y) * (*x - *y) * grid.weight(i))
        .sum::<T>()
        .sqrt()
}
