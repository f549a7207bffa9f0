use crate::error::{Error, Result};
use crate::mollifier::TimeCoefficient;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::solver_fd::SolverConfig;
use crate::solver_fourier::{run_oracle, spectral_sobolev_norm, SpectralField};

/// `t·b'_ε/b_ε` level separating the two regimes on a finite horizon.
pub const CASE_THRESHOLD: f64 = 10.0;

/// Finite-horizon proxy for the large-time behaviour of `t·b'_ε/b_ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticCase {
    /// Above the threshold and still increasing at the horizon.
    Growing,
    /// At most the threshold over the second half of the horizon.
    Bounded,
    Undetermined,
}

impl AsymptoticCase {
    pub fn label(&self) -> &'static str {
        match self {
            AsymptoticCase::Growing => "growing",
            AsymptoticCase::Bounded => "bounded",
            AsymptoticCase::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport<T> {
    /// `(t, t·b'_ε(t)/b_ε(t))`.
    pub samples: Vec<(T, T)>,
    pub sup: T,
    pub sup_last_half: T,
    /// Value at the horizon.
    pub limit_estimate: T,
    pub case: AsymptoticCase,
}

/// Samples `t·b'/b` at `count` equally spaced times in `(0, horizon]`.
pub fn classify_case<T: Real, C: TimeCoefficient<T> + ?Sized>(coeff: &C, horizon: T, count: usize) -> Result<CaseReport<T>> {
    if !(horizon > T::zero()) || count < 20 {
        return Err(Error::Domain("classification needs a positive horizon and at least 20 samples".into()));
    }
    let samples: Vec<(T, T)> = (1..=count)
        .map(|i| {
            let t = horizon * T::from_usize_lossy(i) / T::from_usize_lossy(count);
            (t, t * coeff.derivative(t) / coeff.value(t))
        })
        .collect();
    let sup = samples.iter().fold(T::neg_infinity(), |m, s| m.max(s.1));
    let half = horizon / T::lit(2.0);
    let sup_last_half = samples
        .iter()
        .filter(|s| s.0 >= half)
        .fold(T::neg_infinity(), |m, s| m.max(s.1));
    let last = samples[count - 1].1;
    let earlier = samples[count - count / 20 - 1].1;
    let threshold = T::lit(CASE_THRESHOLD);
    let case = if last > threshold && last > earlier {
        AsymptoticCase::Growing
    } else if sup_last_half <= threshold {
        AsymptoticCase::Bounded
    } else {
        AsymptoticCase::Undetermined
    };
    Ok(CaseReport {
        samples,
        sup,
        sup_last_half,
        limit_estimate: last,
        case,
    })
}

/// True when the last half of `values` increases monotonically and at least
/// doubles.
pub fn grows_without_bound<T: Real>(values: &[T]) -> bool {
    if values.len() < 4 {
        return false;
    }
    let tail = &values[values.len() / 2..];
    let first = tail[0];
    let last = tail[tail.len() - 1];
    tail.windows(2).all(|w| w[1] > w[0]) && first > T::zero() && last >= T::lit(2.0) * first
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundEntry<T> {
    pub time: T,
    /// `‖∂_t^l ∂_x^α u(t)‖`.
    pub lhs: T,
    /// Time weight times data norms on the right-hand side.
    pub scale: T,
    /// `lhs / scale`.
    pub constant: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundTable<T> {
    /// `"b-weighted"` or `"matsumura"`.
    pub family: &'static str,
    pub l: usize,
    pub alpha: usize,
    pub entries: Vec<BoundEntry<T>>,
    pub worst: T,
    pub flagged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DashboardOptions<T> {
    /// Sobolev order `s > 0` of the data norms.
    pub sobolev_order: T,
    pub sample_interval: T,
    pub case_samples: usize,
}

impl<T: Real> Default for DashboardOptions<T> {
    fn default() -> Self {
        Self {
            sobolev_order: T::one(),
            sample_interval: T::one(),
            case_samples: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dashboard<T> {
    pub case: CaseReport<T>,
    pub sobolev_order: T,
    pub tables: Vec<BoundTable<T>>,
    pub worst_constant: T,
    /// Labels of tables whose constant grows without bound in time.
    pub flags: Vec<String>,
    pub max_mode_growth: T,
}

fn weighted_norm<T: Real>(coeffs: &[num_complex::Complex<T>], xi: &[T], alpha: usize, dx: T) -> T {
    let sum: T = coeffs
        .iter()
        .zip(xi)
        .map(|(c, x)| x.abs().powi(2 * alpha as i32) * c.norm_sqr())
        .sum();
    (sum * dx).sqrt()
}

/// Evaluates the decay bounds matching the coefficient's regime along a
/// spectral run and reports the measured constants.
///
/// The regime is read from `t·b'_ε/b_ε`. The growing regime uses the
/// Matsumura weights built from `∫₀ᵗ b_ε/b'_ε`; otherwise the `b_ε`-power
/// weights are used for `l = 0, 1` and `|α| ≤ 2`.
pub fn theorem_dashboard<T: Real>(config: &SolverConfig<T>, options: &DashboardOptions<T>) -> Result<Dashboard<T>> {
    if !(options.sobolev_order > T::zero()) {
        return Err(Error::config("experiment.sobolev_order", "must be positive"));
    }
    if !(options.sample_interval > T::zero()) {
        return Err(Error::config("experiment.sample_interval", "must be positive"));
    }
    let coeff = config.coefficient_model()?;
    let case = classify_case(&coeff, config.t_end, options.case_samples)?;

    let mut cfg = config.clone();
    let count = (config.t_end / options.sample_interval).floor().to_usize().unwrap_or(0);
    cfg.snapshot_times = (0..=count)
        .map(|i| options.sample_interval * T::from_usize_lossy(i))
        .collect();
    let oracle = run_oracle(&cfg, None)?;
    let dx = cfg.grid.dx();
    let period = cfg.grid.span();
    let initial = &oracle.spectral[0].modes;
    let s = options.sobolev_order;
    let data_norm = |r: T| {
        let u0 = SpectralField {
            coefficients: initial.disp.clone(),
            period,
        };
        let u1 = SpectralField {
            coefficients: initial.vel.clone(),
            period,
        };
        spectral_sobolev_norm(&u0, dx, r) + spectral_sobolev_norm(&u1, dx, r - T::one())
    };

    let growing = case.case == AsymptoticCase::Growing;
    let gl = GaussLegendre::new(16);
    let mut integral = T::zero();
    let mut previous = T::zero();
    let mut tables: Vec<BoundTable<T>> = Vec::new();
    for l in 0..=1usize {
        for alpha in 0..=2usize {
            tables.push(BoundTable {
                family: if growing { "matsumura" } else { "b-weighted" },
                l,
                alpha,
                entries: Vec::new(),
                worst: T::zero(),
                flagged: false,
            });
        }
    }
    for snap in &oracle.spectral {
        let t = snap.time;
        let b = coeff.value(t);
        let db = coeff.derivative(t);
        if growing && t > previous {
            integral = integral + gl.integrate_composite(previous, t, 4, |tau| coeff.value(tau) / coeff.derivative(tau));
        }
        previous = t;
        for table in tables.iter_mut() {
            let (l, alpha) = (table.l, table.alpha);
            let field = if l == 0 { &snap.modes.disp } else { &snap.modes.vel };
            let lhs = weighted_norm(field, &oracle.xi, alpha, dx);
            let a = T::from_usize_lossy(alpha);
            let half = T::lit(0.5);
            let weight = if growing {
                let base = T::one() + integral;
                if l == 0 {
                    base.powf(-a * half)
                } else {
                    if !(db > T::zero()) {
                        continue;
                    }
                    b / db * base.powf(-a * half - T::one())
                }
            } else {
                b.powf(-T::one() + T::from_usize_lossy(l) * half)
            };
            let scale = weight * data_norm(s + a + T::from_usize_lossy(l));
            let constant = if scale > T::zero() { lhs / scale } else { T::zero() };
            table.entries.push(BoundEntry {
                time: t,
                lhs,
                scale,
                constant,
            });
        }
    }
    let mut flags = Vec::new();
    let mut worst_constant = T::zero();
    for table in tables.iter_mut() {
        let constants: Vec<T> = table.entries.iter().map(|e| e.constant).collect();
        table.worst = constants.iter().fold(T::zero(), |m, c| m.max(*c));
        table.flagged = grows_without_bound(&constants);
        worst_constant = worst_constant.max(table.worst);
        if table.flagged {
            flags.push(format!("{} l={} alpha={}", table.family, table.l, table.alpha));
        }
    }
    Ok(Dashboard {
        case,
        sobolev_order: s,
        tables,
        worst_constant,
        flags,
        max_mode_growth: oracle.max_mode_growth,
    })
}
