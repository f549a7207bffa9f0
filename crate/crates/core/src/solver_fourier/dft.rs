use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver_fd::Grid1D;

/// Unitary DFT coefficients of a field on a periodic grid, in FFT order
/// (`0, 1, …, n/2, −(n−1)/2, …, −1`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T> {
    pub coefficients: Vec<Complex<T>>,
    pub period: T,
}

impl<T: Real> SpectralField<T> {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Signed integer wavenumber of slot `index`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        wavenumber(index, self.len())
    }

    /// `ξ = 2πk / L_per` for slot `index`.
    pub fn xi(&self, index: usize) -> T {
        physical_wavenumber(index, self.len(), self.period)
    }

    /// Coefficient at signed wavenumber `k`.
    pub fn at(&self, k: i64) -> Complex<T> {
        let n = self.len() as i64;
        self.coefficients[k.rem_euclid(n) as usize]
    }
}

pub fn wavenumber(index: usize, n: usize) -> i64 {
    if index <= n / 2 {
        index as i64
    } else {
        index as i64 - n as i64
    }
}

pub fn physical_wavenumber<T: Real>(index: usize, n: usize, period: T) -> T {
    T::lit(2.0) * T::PI() * T::lit(wavenumber(index, n) as f64) / period
}

/// Whether slot `index` is the unpaired Nyquist mode of an even-length grid.
pub fn is_nyquist(index: usize, n: usize) -> bool {
    n % 2 == 0 && index == n / 2
}

/// Physical wavenumbers of every slot, in FFT order.
pub fn wavenumbers<T: Real>(grid: &Grid1D<T>) -> Vec<T> {
    (0..grid.len())
        .map(|i| physical_wavenumber(i, grid.len(), grid.span()))
        .collect()
}

fn require_periodic<T: Real>(grid: &Grid1D<T>) -> Result<()> {
    if grid.is_periodic() {
        Ok(())
    } else {
        Err(Error::Domain("the spectral oracle needs a periodic grid".into()))
    }
}

fn transform<T: Real>(buffer: &mut [Complex<T>], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buffer.len())
    } else {
        planner.plan_fft_forward(buffer.len())
    };
    fft.process(buffer);
    let scale = T::one() / T::from_usize_lossy(buffer.len()).sqrt();
    for c in buffer.iter_mut() {
        *c = *c * scale;
    }
}

pub fn dft_forward<T: Real>(field: &[T], grid: &Grid1D<T>) -> Result<SpectralField<T>> {
    require_periodic(grid)?;
    if field.len() != grid.len() {
        return Err(Error::Grid(format!(
            "field has {} values, grid has {} nodes",
            field.len(),
            grid.len()
        )));
    }
    let mut buffer: Vec<Complex<T>> = field.iter().map(|&v| Complex::new(v, T::zero())).collect();
    transform(&mut buffer, false);
    Ok(SpectralField {
        coefficients: buffer,
        period: grid.span(),
    })
}

/// Complex inverse transform.
pub fn dft_inverse_complex<T: Real>(spec: &SpectralField<T>) -> Vec<Complex<T>> {
    let mut buffer = spec.coefficients.clone();
    transform(&mut buffer, true);
    buffer
}

/// Real part of the inverse transform.
pub fn dft_inverse<T: Real>(spec: &SpectralField<T>) -> Vec<T> {
    dft_inverse_complex(spec).into_iter().map(|c| c.re).collect()
}

/// `(Σ_k (1+ξ_k²)^s |f̂_k|² Δx)^{1/2}` with unitary `f̂`.
///
/// This equals `(L_per Σ (1+ξ²)^s |c_k|²)^{1/2}` for Fourier-series
/// coefficients `c_k = f̂_k/√n`, and reduces to the discrete L² norm at `s = 0`.
pub fn sobolev_norm<T: Real>(field: &[T], grid: &Grid1D<T>, s: T) -> Result<T> {
    let spec = dft_forward(field, grid)?;
    Ok(spectral_sobolev_norm(&spec, grid.dx(), s))
}

pub fn spectral_sobolev_norm<T: Real>(spec: &SpectralField<T>, dx: T, s: T) -> T {
    let sum: T = (0..spec.len())
        .map(|i| {
            let xi = spec.xi(i);
            (T::one() + xi * xi).powf(s) * spec.coefficients[i].norm_sqr()
        })
        .sum();
    (sum * dx).sqrt()
}

/// Applies the Fourier multiplier `(1+ξ²)^{s/2}`.
pub fn sobolev_multiplier<T: Real>(field: &[T], grid: &Grid1D<T>, s: T) -> Result<Vec<T>> {
    let mut spec = dft_forward(field, grid)?;
    let half = s / T::lit(2.0);
    for i in 0..spec.len() {
        let xi = spec.xi(i);
        spec.coefficients[i] = spec.coefficients[i] * (T::one() + xi * xi).powf(half);
    }
    Ok(dft_inverse(&spec))
}

/// Spectral derivative; the Nyquist mode is dropped.
pub fn spectral_derivative<T: Real>(field: &[T], grid: &Grid1D<T>) -> Result<Vec<T>> {
    let mut spec = dft_forward(field, grid)?;
    let n = spec.len();
    for i in 0..n {
        let factor = if is_nyquist(i, n) {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::zero(), spec.xi(i))
        };
        spec.coefficients[i] = spec.coefficients[i] * factor;
    }
    Ok(dft_inverse(&spec))
}
