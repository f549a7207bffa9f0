//! Spectral oracle on periodic domains.
//!
//! Every Fourier mode obeys `û'' + ξ² û + (b'_ε/b_ε) û' = f̂`, integrated with
//! the same RK4 stepper as the finite-difference solver. In the symmetric
//! variables `V = (i|ξ|û, û')` the system reads `V' = K V + F` with
//! `K = [[0, i|ξ|], [i|ξ|, −b'_ε/b_ε]]`, so `Re⟨KV, V⟩ = −(b'_ε/b_ε)|V₂|²`.

mod dft;

pub use dft::{
    dft_forward, dft_inverse, dft_inverse_complex, is_nyquist, physical_wavenumber,
    sobolev_multiplier, sobolev_norm, spectral_derivative, spectral_sobolev_norm, wavenumber,
    wavenumbers, SpectralField,
};

use num_complex::Complex;

use crate::diagnostics::{energy, l2_norm, sup_norm};
use crate::error::{Error, Result};
use crate::initial_data::sample_u0;
use crate::mollifier::TimeCoefficient;
use crate::scalar::Real;
use crate::solver_fd::{
    check_cone, rk4_step, DiagnosticSample, FieldPair, OdeState, Snapshot, SolverConfig,
    Trajectory,
};

/// Displacement and velocity of one Fourier mode.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeState<T> {
    pub disp: Complex<T>,
    pub vel: Complex<T>,
}

impl<T: Real> ModeState<T> {
    pub fn new(disp: Complex<T>, vel: Complex<T>) -> Self {
        Self { disp, vel }
    }

    /// `V = (i|ξ|û, û')`.
    pub fn symmetric(&self, xi: T) -> [Complex<T>; 2] {
        [self.disp * Complex::new(T::zero(), xi.abs()), self.vel]
    }

    /// `|V|² = ξ²|û|² + |û'|²`.
    pub fn energy(&self, xi: T) -> T {
        xi * xi * self.disp.norm_sqr() + self.vel.norm_sqr()
    }
}

impl<T: Real> OdeState<T> for ModeState<T> {
    fn add_scaled(&mut self, factor: T, other: &Self) {
        self.disp = self.disp + other.disp * factor;
        self.vel = self.vel + other.vel * factor;
    }

    fn all_finite(&self) -> bool {
        finite(&self.disp) && finite(&self.vel)
    }
}

fn finite<T: Real>(c: &Complex<T>) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

fn mode_rate<T: Real>(state: &ModeState<T>, xi: T, ratio: T, forcing: Complex<T>) -> ModeState<T> {
    ModeState {
        disp: state.vel,
        vel: forcing - state.disp * (xi * xi) - state.vel * ratio,
    }
}

/// Time derivative of one mode at time `t`.
pub fn mode_rhs<T: Real, C: TimeCoefficient<T> + ?Sized>(
    state: &ModeState<T>,
    xi: T,
    t: T,
    coeff: &C,
    forcing: Option<Complex<T>>,
) -> ModeState<T> {
    let ratio = coeff.derivative(t) / coeff.value(t);
    mode_rate(state, xi, ratio, forcing.unwrap_or_default())
}

/// All modes of a field, in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBank<T> {
    pub disp: Vec<Complex<T>>,
    pub vel: Vec<Complex<T>>,
}

impl<T: Real> ModeBank<T> {
    pub fn len(&self) -> usize {
        self.disp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disp.is_empty()
    }

    pub fn mode(&self, index: usize) -> ModeState<T> {
        ModeState::new(self.disp[index], self.vel[index])
    }

    pub fn energies(&self, xi: &[T]) -> Vec<T> {
        (0..self.len()).map(|i| self.mode(i).energy(xi[i])).collect()
    }
}

impl<T: Real> OdeState<T> for ModeBank<T> {
    fn add_scaled(&mut self, factor: T, other: &Self) {
        for (a, b) in self.disp.iter_mut().zip(&other.disp) {
            *a = *a + *b * factor;
        }
        for (a, b) in self.vel.iter_mut().zip(&other.vel) {
            *a = *a + *b * factor;
        }
    }

    fn all_finite(&self) -> bool {
        self.disp.iter().chain(&self.vel).all(finite)
    }
}

/// Spectral forcing `f̂(t)` in FFT order, unitary normalization.
pub type ModeForcing<'a, T> = &'a dyn Fn(T) -> Vec<Complex<T>>;

/// Mode bank recorded at one step.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSnapshot<T> {
    pub time: T,
    pub step: usize,
    pub modes: ModeBank<T>,
}

/// `‖u_x‖² + ‖u_t‖²` and `∫₀ᵗ ‖f‖²` along a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample<T> {
    pub time: T,
    pub energy: T,
    pub forcing_integral: T,
}

#[derive(Clone, Debug)]
pub struct OracleRun<T> {
    /// Physical snapshots and norms, in the same layout as the FD solver.
    pub trajectory: Trajectory<T>,
    pub spectral: Vec<SpectralSnapshot<T>>,
    pub energy_series: Vec<EnergySample<T>>,
    /// Integer wavenumbers and `ξ` of every slot.
    pub k: Vec<i64>,
    pub xi: Vec<T>,
    /// Largest relative one-step growth of a single mode energy, over modes
    /// holding at least `1e-12` of the largest mode energy.
    pub max_mode_growth: T,
}

fn reconstruct<T: Real>(
    modes: &ModeBank<T>,
    xi: &[T],
    mean_p: Complex<T>,
    b: T,
    period: T,
) -> FieldPair<T> {
    let n = modes.len();
    let u = dft_inverse(&SpectralField {
        coefficients: modes.disp.clone(),
        period,
    });
    // p_t = −b u_x and u_t = −p_x / b give p̂ = i b û_t / ξ off the mean.
    let p_hat: Vec<Complex<T>> = (0..n)
        .map(|i| {
            if i == 0 {
                mean_p
            } else if is_nyquist(i, n) {
                Complex::default()
            } else {
                modes.vel[i] * Complex::new(T::zero(), b / xi[i])
            }
        })
        .collect();
    let p = dft_inverse(&SpectralField {
        coefficients: p_hat,
        period,
    });
    FieldPair { p, u }
}

fn gradient_energy<T: Real>(modes: &ModeBank<T>, xi: &[T], dx: T) -> T {
    modes.energies(xi).into_iter().sum::<T>() * dx
}

fn forcing_norm_sq<T: Real>(forcing: Option<ModeForcing<'_, T>>, t: T, dx: T) -> T {
    forcing.map_or(T::zero(), |f| f(t).iter().map(|c| c.norm_sqr()).sum::<T>() * dx)
}

/// Integrates every mode from `t = 0` to `t_end` with the configured schedule.
pub fn run_oracle<T: Real>(config: &SolverConfig<T>, forcing: Option<ModeForcing<'_, T>>) -> Result<OracleRun<T>> {
    config.validate()?;
    let grid = config.grid;
    if !grid.is_periodic() {
        return Err(Error::Domain("the spectral oracle needs a periodic grid".into()));
    }
    let coeff = config.coefficient_model()?;
    let schedule = config.schedule();
    let n = grid.len();
    let dx = grid.dx();
    let period = grid.span();

    let f = sample_u0(&config.pulse, &grid)?;
    let mut warnings = Vec::new();
    if let Some(w) = check_cone(config, &FieldPair { p: f.clone(), u: f.clone() })? {
        warnings.push(w);
    }
    let f_hat = dft_forward(&f, &grid)?;
    let xi = wavenumbers(&grid);
    let k: Vec<i64> = (0..n).map(|i| wavenumber(i, n)).collect();
    let b0 = coeff.value(T::zero());
    // u_t(0) = −f'/b(0), differentiated spectrally.
    let vel: Vec<Complex<T>> = (0..n)
        .map(|i| {
            if is_nyquist(i, n) {
                Complex::default()
            } else {
                f_hat.coefficients[i] * Complex::new(T::zero(), -xi[i] / b0)
            }
        })
        .collect();
    let mean_p = f_hat.coefficients[0];
    let mut modes = ModeBank {
        disp: f_hat.coefficients,
        vel,
    };

    let rhs = |bank: &ModeBank<T>, t: T| {
        let ratio = coeff.derivative(t) / coeff.value(t);
        let forced = forcing.map(|g| g(t));
        let mut out = ModeBank {
            disp: Vec::with_capacity(n),
            vel: Vec::with_capacity(n),
        };
        for i in 0..n {
            let fi = forced.as_ref().map_or(Complex::default(), |v| v[i]);
            let r = mode_rate(&bank.mode(i), xi[i], ratio, fi);
            out.disp.push(r.disp);
            out.vel.push(r.vel);
        }
        out
    };

    let targets = schedule.snapshot_targets(&config.snapshot_times);
    let mut next_target = 0;
    let mut snapshots = Vec::with_capacity(targets.len());
    let mut spectral = Vec::with_capacity(targets.len());
    let mut series = Vec::new();
    let mut energy_series = Vec::new();
    let mut forcing_integral = T::zero();
    let mut max_mode_growth = T::neg_infinity();
    let steps = schedule.steps();
    let mut energies = modes.energies(&xi);

    for step in 0..=steps {
        let t = schedule.time(step);
        let diag = step % config.diag_every == 0 || step == steps;
        let wants_snapshot = next_target < targets.len() && targets[next_target].0 == step;
        if diag || wants_snapshot {
            let fields = reconstruct(&modes, &xi, mean_p, coeff.value(t), period);
            while next_target < targets.len() && targets[next_target].0 == step {
                snapshots.push(Snapshot {
                    requested: targets[next_target].1,
                    time: t,
                    step,
                    fields: fields.clone(),
                });
                spectral.push(SpectralSnapshot {
                    time: t,
                    step,
                    modes: modes.clone(),
                });
                next_target += 1;
            }
            if diag {
                series.push(DiagnosticSample {
                    time: t,
                    l2_u: l2_norm(&fields.u, &grid),
                    sup_u: sup_norm(&fields.u),
                    energy: energy(&fields, &grid),
                });
                energy_series.push(EnergySample {
                    time: t,
                    energy: gradient_energy(&modes, &xi, dx),
                    forcing_integral,
                });
            }
        }
        if step == steps {
            break;
        }
        let h = schedule.time(step + 1) - t;
        modes = rk4_step(&modes, t, h, rhs).map_err(|_| Error::Instability {
            step: step + 1,
            time: schedule.time(step + 1).to_f64_lossy(),
        })?;
        if forcing.is_some() {
            let half = h / T::lit(2.0);
            forcing_integral = forcing_integral
                + h / T::lit(6.0)
                    * (forcing_norm_sq(forcing, t, dx)
                        + T::lit(4.0) * forcing_norm_sq(forcing, t + half, dx)
                        + forcing_norm_sq(forcing, t + h, dx));
        }
        let next = modes.energies(&xi);
        let floor = T::lit(1e-12) * energies.iter().fold(T::zero(), |m, e| m.max(*e));
        for (before, after) in energies.iter().zip(&next) {
            if *before > floor && *before > T::zero() {
                max_mode_growth = max_mode_growth.max((*after - *before) / *before);
            }
        }
        energies = next;
    }

    Ok(OracleRun {
        trajectory: Trajectory {
            info: config.run_info(),
            snapshots,
            series,
            warnings,
        },
        spectral,
        energy_series,
        k,
        xi,
        max_mode_growth: if steps == 0 { T::zero() } else { max_mode_growth },
    })
}

/// Per-mode energies `|ξ|²|û|² + |û_t|²` at every spectral snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeEnergyTable<T> {
    pub times: Vec<T>,
    pub k: Vec<i64>,
    pub xi: Vec<T>,
    /// `energy[snapshot][slot]`.
    pub energy: Vec<Vec<T>>,
}

pub fn mode_energy_series<T: Real>(run: &OracleRun<T>) -> ModeEnergyTable<T> {
    ModeEnergyTable {
        times: run.spectral.iter().map(|s| s.time).collect(),
        k: run.k.clone(),
        xi: run.xi.clone(),
        energy: run.spectral.iter().map(|s| s.modes.energies(&run.xi)).collect(),
    }
}

/// Measured constants of `E(t) ≤ C₁ E(0) + C₂ ∫₀ᵗ ‖f‖²` with
/// `E = ‖u_x‖² + ‖u_t‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyConstants<T> {
    /// `sup_t E(t)/E(0)` of the unforced run.
    pub c1: T,
    /// `sup_t E(t)/∫₀ᵗ‖f‖²` of the forced run from zero data; zero without forcing.
    pub c2: T,
    pub max_mode_growth: T,
}

pub fn energy_inequality_constants<T: Real>(
    config: &SolverConfig<T>,
    forcing: Option<ModeForcing<'_, T>>,
) -> Result<EnergyConstants<T>> {
    let free = run_oracle(config, None)?;
    let e0 = free.energy_series[0].energy;
    if !(e0 > T::zero()) {
        return Err(Error::Diagnostics("initial energy vanishes".into()));
    }
    let c1 = free
        .energy_series
        .iter()
        .fold(T::zero(), |m, s| m.max(s.energy / e0));
    let c2 = match forcing {
        None => T::zero(),
        Some(g) => {
            let mut quiet = config.clone();
            quiet.pulse = crate::initial_data::PulseSpec::Samples(vec![T::zero(); config.grid.len()]);
            let forced = run_oracle(&quiet, Some(g))?;
            forced
                .energy_series
                .iter()
                .filter(|s| s.forcing_integral > T::zero())
                .fold(T::zero(), |m, s| m.max(s.energy / s.forcing_integral))
        }
    };
    Ok(EnergyConstants {
        c1,
        c2,
        max_mode_growth: free.max_mode_growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::BreakpointFunction;
    use crate::diagnostics::l2_distance;
    use crate::initial_data::PulseSpec;
    use crate::mollifier::{Mollifier, RegularizedCoefficient};
    use crate::quadrature::GaussLegendre;
    use crate::solver_fd::{run, Grid1D, TimeStep};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn config(b: BreakpointFunction<f64>, eps: Option<f64>, n: usize, t_end: f64) -> SolverConfig<f64> {
        let grid = Grid1D::periodic(-15.0, 25.0, n).unwrap();
        let mut cfg = SolverConfig::new(grid, b, PulseSpec::paper_gaussian());
        cfg.epsilon = eps;
        cfg.t_end = t_end;
        cfg
    }

    #[test]
    fn zero_state_has_zero_rate() {
        let one = BreakpointFunction::constant(1.0);
        let r = mode_rhs(&ModeState::default(), 3.0, 0.5, &one, None);
        assert_eq!(r, ModeState::default());
        assert_eq!(ModeState::<f64>::default().energy(2.0), 0.0);
    }

    #[test]
    fn symmetric_form_matches_energy() {
        let m = ModeState::new(c(1.0, 2.0), c(-0.5, 0.25));
        let v = m.symmetric(-3.0);
        assert!((v[0].norm_sqr() + v[1].norm_sqr() - m.energy(-3.0)).abs() < 1e-12);
    }

    #[test]
    fn harmonic_oscillator() {
        let one = BreakpointFunction::constant(1.0);
        let xi = 2.5;
        let (u0, u1) = (c(1.0, -0.5), c(0.3, 0.2));
        let mut s = ModeState::new(u0, u1);
        let dt = 1e-3;
        for n in 0..4000 {
            s = rk4_step(&s, n as f64 * dt, dt, |m, t| mode_rhs(m, xi, t, &one, None)).unwrap();
        }
        let t = 4.0;
        let want = u0 * (xi * t).cos() + u1 * ((xi * t).sin() / xi);
        assert!((s.disp - want).norm() < 1e-10);
    }

    #[test]
    fn zero_mode_closed_form() {
        let reg = RegularizedCoefficient::new(BreakpointFunction::paper(), Mollifier::paper(), 0.5).unwrap();
        let (u0, u1) = (c(0.7, 0.0), c(1.0, -1.0));
        let mut s = ModeState::new(u0, u1);
        let dt = 0.005;
        for n in 0..2000 {
            s = rk4_step(&s, n as f64 * dt, dt, |m, t| mode_rhs(m, 0.0, t, &reg, None)).unwrap();
        }
        let b0 = reg.value(0.0);
        let vel = u1 * (b0 / reg.value(10.0));
        assert!((s.vel - vel).norm() < 1e-9);
        let gl = GaussLegendre::new(16);
        let integral = gl.integrate_composite(0.0, 10.0, 200, |t| b0 / reg.value(t));
        assert!((s.disp - (u0 + u1 * integral)).norm() < 1e-8);
    }

    #[test]
    fn duhamel_single_mode() {
        let cfg = {
            let mut cfg = config(BreakpointFunction::constant(1.0), None, 64, 3.0);
            cfg.pulse = PulseSpec::Samples(vec![0.0; 64]);
            cfg.cone_guard = crate::solver_fd::ConeGuard::Off;
            cfg.time_step = TimeStep::Fixed(0.005);
            cfg
        };
        let slot = 2;
        let forcing = |t: f64| {
            let mut v = vec![c(0.0, 0.0); 64];
            v[slot] = c(t.cos(), 0.5 * t);
            v
        };
        let oracle = run_oracle(&cfg, Some(&forcing)).unwrap();
        let xi = oracle.xi[slot];
        let t = 3.0;
        let gl = GaussLegendre::new(16);
        let re = gl.integrate_composite(0.0, t, 40, |s| (xi * (t - s)).sin() * s.cos() / xi);
        let im = gl.integrate_composite(0.0, t, 40, |s| (xi * (t - s)).sin() * 0.5 * s / xi);
        let got = oracle.spectral.last().unwrap().modes.disp[slot];
        assert!((got - c(re, im)).norm() < 1e-8, "{got} vs {re} {im}");
        let quiet = oracle.spectral.last().unwrap().modes.disp[slot + 1];
        assert_eq!(quiet, c(0.0, 0.0));
    }

    #[test]
    fn translation_is_spectrally_accurate() {
        let cfg = config(BreakpointFunction::constant(1.0), None, 2000, 5.0);
        let oracle = run_oracle(&cfg, None).unwrap();
        let snap = oracle.trajectory.final_snapshot().unwrap();
        let pulse = PulseSpec::paper_gaussian();
        for (x, (u, p)) in cfg.grid.nodes().iter().zip(snap.fields.u.iter().zip(&snap.fields.p)) {
            let want = pulse.value(x - 5.0).unwrap();
            assert!((u - want).abs() < 1e-6);
            assert!((p - want).abs() < 1e-6);
        }
    }

    #[test]
    fn agrees_with_finite_differences() {
        let mut cfg = config(BreakpointFunction::paper(), Some(0.5), 2000, 10.0);
        cfg.snapshot_times = vec![5.0];
        let fd = run(&cfg).unwrap();
        let oracle = run_oracle(&cfg, None).unwrap();
        for (a, b) in fd.snapshots.iter().zip(&oracle.trajectory.snapshots) {
            assert_eq!(a.step, b.step);
            let diff = l2_distance(&a.fields.u, &b.fields.u, &cfg.grid);
            let rel = diff / l2_norm(&b.fields.u, &cfg.grid);
            assert!(rel <= 1e-3, "t = {} rel {rel}", a.time);
        }
    }

    #[test]
    fn mode_energies_are_monotone() {
        let mut cfg = config(BreakpointFunction::paper(), Some(0.5), 1000, 10.0);
        cfg.snapshot_times = (0..=10).map(|t| t as f64).collect();
        let oracle = run_oracle(&cfg, None).unwrap();
        assert!(oracle.max_mode_growth <= 1e-8, "growth {}", oracle.max_mode_growth);
        let table = mode_energy_series(&oracle);
        assert_eq!(table.times.len(), 11);
        let total: Vec<f64> = table.energy.iter().map(|row| row.iter().sum()).collect();
        assert!(total.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10)));
        assert!(total[10] < 0.9 * total[0]);
    }

    #[test]
    fn constant_coefficient_conserves_mode_energy() {
        let mut cfg = config(BreakpointFunction::constant(1.0), None, 1000, 5.0);
        cfg.time_step = TimeStep::Fixed(0.004);
        cfg.snapshot_times = vec![2.5];
        let oracle = run_oracle(&cfg, None).unwrap();
        let table = mode_energy_series(&oracle);
        let scale = table.energy[0].iter().fold(0.0f64, |m, e| m.max(*e));
        for i in 0..table.k.len() {
            let drift = (table.energy[2][i] - table.energy[0][i]).abs() / scale;
            assert!(drift <= 1e-8 * 5.0, "mode {} drift {drift}", table.k[i]);
        }
    }

    #[test]
    fn zero_field_has_zero_energy() {
        let mut cfg = config(BreakpointFunction::constant(1.0), None, 64, 1.0);
        cfg.pulse = PulseSpec::Samples(vec![0.0; 64]);
        let oracle = run_oracle(&cfg, None).unwrap();
        let table = mode_energy_series(&oracle);
        assert!(table.energy.iter().flatten().all(|e| *e == 0.0));
    }

    #[test]
    fn energy_constants_are_reported() {
        let cfg = config(BreakpointFunction::paper(), Some(0.5), 400, 8.0);
        let grid = cfg.grid;
        let forcing = move |t: f64| {
            let f: Vec<f64> = grid.nodes().iter().map(|x| (-(x - 2.0) * (x - 2.0)).exp() * t.sin()).collect();
            dft_forward(&f, &grid).unwrap().coefficients
        };
        let consts = energy_inequality_constants(&cfg, Some(&forcing)).unwrap();
        assert!(consts.c1 <= 1.0 + 1e-8);
        assert!(consts.c2 > 0.0 && consts.c2.is_finite());
    }

    #[test]
    fn bounded_grid_is_rejected() {
        let grid = Grid1D::bounded(-15.0, 25.0, 401).unwrap();
        let mut cfg = SolverConfig::new(grid, BreakpointFunction::constant(1.0), PulseSpec::paper_gaussian());
        cfg.t_end = 1.0;
        cfg.time_step = TimeStep::Cfl(0.4);
        assert!(matches!(run_oracle(&cfg, None), Err(Error::Domain(_))));
    }
}
