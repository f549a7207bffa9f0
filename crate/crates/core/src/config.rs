//! Run configuration files.
//!
//! A config is a TOML document with the sections `[coefficient]`,
//! `[mollifier]`, `[grid]`, `[pulse]`, `[run]` and `[experiment]`. Every key
//! has a default, so an empty file describes the Gaussian run on `[−50, 70]`
//! with `ε = 0.01`. Keys are listed in [`VALID_KEYS`] and documented in the
//! README.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coefficient::BreakpointFunction;
use crate::diagnostics::EchoOptions;
use crate::error::{Error, Result};
use crate::experiments::DashboardOptions;
use crate::initial_data::PulseSpec;
use crate::mollifier::Mollifier;
use crate::solver_fd::{ConeGuard, Grid1D, SolverConfig, TimeStep, DEFAULT_CFL};

/// Version of the config layout; written into every effective config.
pub const SCHEMA_VERSION: u32 = 1;

/// Every accepted `section.key`.
pub const VALID_KEYS: &[&str] = &[
    "schema",
    "coefficient.kind",
    "coefficient.left",
    "coefficient.breakpoints",
    "coefficient.pieces",
    "coefficient.scale",
    "coefficient.rate",
    "coefficient.horizon",
    "coefficient.piece_length",
    "mollifier.sharpness",
    "mollifier.alt_sharpness",
    "grid.xmin",
    "grid.xmax",
    "grid.dx",
    "grid.n",
    "grid.periodic",
    "pulse.kind",
    "pulse.center",
    "pulse.width",
    "pulse.scale",
    "run.dt",
    "run.cfl",
    "run.t_end",
    "run.epsilon",
    "run.snapshot_times",
    "run.diag_every",
    "run.cfl_max",
    "run.cone_guard",
    "run.cone_threshold",
    "experiment.epsilons",
    "experiment.compare_time",
    "experiment.refinement",
    "experiment.derivative_order",
    "experiment.window",
    "experiment.decay_start",
    "experiment.echo_min_fraction",
    "experiment.echo_persistence",
    "experiment.echo_max_spacing",
    "experiment.echo_min_speed",
    "experiment.sobolev_order",
    "experiment.sample_interval",
    "experiment.case_samples",
    "experiment.coefficient_samples",
    "experiment.layer_depths",
    "experiment.layer_density",
    "experiment.layer_speed",
    "experiment.transform_depth",
    "experiment.transform_samples",
];

/// Optional values are written as the string `none` when absent, so that a
/// written config reads back unchanged.
mod optional {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<V> {
        Value(V),
        Word(String),
    }

    pub fn serialize<V: Serialize, S: Serializer>(v: &Option<V>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => v.serialize(s),
            None => s.serialize_str("none"),
        }
    }

    pub fn deserialize<'de, V: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<Option<V>, D::Error> {
        match Repr::<V>::deserialize(d)? {
            Repr::Value(v) => Ok(Some(v)),
            Repr::Word(w) if w == "none" => Ok(None),
            Repr::Word(w) => Err(serde::de::Error::custom(format!("expected a number or \"none\", got \"{w}\""))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema: u32,
    pub coefficient: CoefficientSection,
    pub mollifier: MollifierSection,
    pub grid: GridSection,
    pub pulse: PulseSection,
    pub run: RunSection,
    pub experiment: ExperimentSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            coefficient: CoefficientSection::default(),
            mollifier: MollifierSection::default(),
            grid: GridSection::default(),
            pulse: PulseSection::default(),
            run: RunSection::default(),
            experiment: ExperimentSection::default(),
        }
    }
}

/// `kind = "piecewise"` reads `left`, `breakpoints` and `pieces` (ascending
/// polynomial coefficients in absolute time, one list per breakpoint);
/// `kind = "exponential_ramp"` reads `scale`, `rate`, `horizon` and
/// `piece_length`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoefficientSection {
    pub kind: String,
    pub left: f64,
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
    pub scale: f64,
    pub rate: f64,
    pub horizon: f64,
    pub piece_length: f64,
}

impl Default for CoefficientSection {
    fn default() -> Self {
        Self {
            kind: "piecewise".into(),
            left: 1.0,
            breakpoints: vec![5.0],
            pieces: vec![vec![1.5, 0.1]],
            scale: 1.0,
            rate: 1.0,
            horizon: 10.0,
            piece_length: 0.5,
        }
    }
}

/// `sharpness = 1` is the standard bump; `alt_sharpness` is the second
/// mollifier of the sensitivity table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MollifierSection {
    pub sharpness: f64,
    pub alt_sharpness: f64,
}

impl Default for MollifierSection {
    fn default() -> Self {
        Self {
            sharpness: 1.0,
            alt_sharpness: 2.0,
        }
    }
}

/// Exactly one of `dx` and `n` is set; the other is `"none"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub xmin: f64,
    pub xmax: f64,
    #[serde(with = "optional")]
    pub dx: Option<f64>,
    #[serde(with = "optional")]
    pub n: Option<usize>,
    pub periodic: bool,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            xmin: -50.0,
            xmax: 70.0,
            dx: Some(0.0171),
            n: None,
            periodic: true,
        }
    }
}

/// `kind = "gaussian"` uses `center` and `width`; `"lorentzian"` uses `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    pub kind: String,
    pub center: f64,
    pub width: f64,
    pub scale: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            kind: "gaussian".into(),
            center: 0.0,
            width: 0.3,
            scale: 0.01,
        }
    }
}

/// A fixed `dt` takes precedence over `cfl`. `epsilon = "none"` runs with
/// the raw coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    #[serde(with = "optional")]
    pub dt: Option<f64>,
    pub cfl: f64,
    pub t_end: f64,
    #[serde(with = "optional")]
    pub epsilon: Option<f64>,
    pub snapshot_times: Vec<f64>,
    pub diag_every: usize,
    pub cfl_max: f64,
    pub cone_guard: String,
    pub cone_threshold: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let mut snapshot_times: Vec<f64> = (0..=12).map(|i| 4.8 + 0.2 * i as f64).collect();
        snapshot_times.push(60.0);
        Self {
            dt: Some(0.0067),
            cfl: DEFAULT_CFL,
            t_end: 60.0,
            epsilon: Some(0.01),
            snapshot_times,
            diag_every: 10,
            cfl_max: DEFAULT_CFL,
            cone_guard: "warn".into(),
            cone_threshold: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub epsilons: Vec<f64>,
    pub compare_time: f64,
    /// Also run the grid-halving study at the smallest ε.
    pub refinement: bool,
    pub derivative_order: usize,
    pub window: [f64; 2],
    pub decay_start: f64,
    pub echo_min_fraction: f64,
    pub echo_persistence: usize,
    pub echo_max_spacing: f64,
    pub echo_min_speed: f64,
    pub sobolev_order: f64,
    pub sample_interval: f64,
    pub case_samples: usize,
    pub coefficient_samples: usize,
    pub layer_depths: Vec<f64>,
    pub layer_density: Vec<f64>,
    pub layer_speed: Vec<f64>,
    pub transform_depth: f64,
    pub transform_samples: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            epsilons: vec![0.2, 0.1, 0.05, 0.02, 0.01],
            compare_time: 60.0,
            refinement: false,
            derivative_order: 1,
            window: [0.0, 20.0],
            decay_start: 10.0,
            echo_min_fraction: 0.05,
            echo_persistence: 3,
            echo_max_spacing: 0.4,
            echo_min_speed: 0.5,
            sobolev_order: 1.0,
            sample_interval: 1.0,
            case_samples: 2000,
            coefficient_samples: 2001,
            layer_depths: vec![1.0, 2.0],
            layer_density: vec![1.0, 3.0, 1.5],
            layer_speed: vec![1.0, 0.5, 2.0],
            transform_depth: 3.0,
            transform_samples: 61,
        }
    }
}

fn valid_key_list() -> String {
    VALID_KEYS.join(", ")
}

fn parse_error(err: toml::de::Error) -> Error {
    let message = err.message().to_string();
    let key = if message.contains("unknown field") {
        "unknown key"
    } else {
        "file"
    };
    Error::config(key, format!("{message}; valid keys: {}", valid_key_list()))
}

/// Parses an override value as TOML, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(parse_error)?;
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(parse_error)?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::config(
                "schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", cfg.schema),
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("file", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Applies `section.key=value` overrides. `value` is read as TOML, so
    /// `run.epsilon=0.05`, `grid.periodic=false` and
    /// `experiment.epsilons=[0.4, 0.2, 0.1]` all work; `none` clears an
    /// optional key.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut table = toml::Table::try_from(self).expect("config serializes");
        for item in overrides {
            let item = item.as_ref();
            let (key, raw) = item.split_once('=').ok_or_else(|| {
                Error::config(item, "override must have the form section.key=value")
            })?;
            let key = key.trim();
            let raw = raw.trim();
            if !VALID_KEYS.contains(&key) {
                return Err(Error::config(
                    key,
                    format!("unknown key; valid keys: {}", valid_key_list()),
                ));
            }
            let (section, name) = match key.split_once('.') {
                Some((s, n)) => (Some(s), n),
                None => (None, key),
            };
            let target = match section {
                Some(s) => table
                    .entry(s)
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                    .as_table_mut()
                    .expect("sections are tables"),
                None => &mut table,
            };
            target.insert(name.to_string(), parse_value(raw));
        }
        Self::from_table(table).map_err(|e| match e {
            Error::Config { key, message } if key == "file" || key == "unknown key" => {
                Error::config("override", message)
            }
            other => other,
        })
    }

    /// Coarsens the grid spacing and any fixed time step by `factor`.
    pub fn coarsened(&self, factor: usize) -> Self {
        let mut cfg = self.clone();
        let f = factor as f64;
        if let Some(dx) = cfg.grid.dx.as_mut() {
            *dx *= f;
        }
        if let Some(n) = cfg.grid.n.as_mut() {
            *n = (*n / factor).max(crate::solver_fd::MIN_NODES);
        }
        if let Some(dt) = cfg.run.dt.as_mut() {
            *dt *= f;
        }
        cfg
    }

    /// Canonical TOML text of the config.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn coefficient(&self) -> Result<BreakpointFunction<f64>> {
        let c = &self.coefficient;
        match c.kind.as_str() {
            "piecewise" => {
                if c.breakpoints.len() != c.pieces.len() {
                    return Err(Error::config(
                        "coefficient.pieces",
                        format!(
                            "{} breakpoints but {} pieces",
                            c.breakpoints.len(),
                            c.pieces.len()
                        ),
                    ));
                }
                let entries = c.breakpoints.iter().copied().zip(c.pieces.iter().cloned()).collect();
                BreakpointFunction::new(c.left, entries)
                    .map_err(|e| Error::config("coefficient.pieces", e.to_string()))
            }
            "exponential_ramp" => {
                BreakpointFunction::exponential_ramp(c.scale, c.rate, c.horizon, c.piece_length)
                    .map_err(|e| Error::config("coefficient.kind", e.to_string()))
            }
            other => Err(Error::config(
                "coefficient.kind",
                format!("unknown kind `{other}`; expected piecewise or exponential_ramp"),
            )),
        }
    }

    pub fn mollifier(&self) -> Result<Mollifier<f64>> {
        Mollifier::with_sharpness(self.mollifier.sharpness)
            .map_err(|e| Error::config("mollifier.sharpness", e.to_string()))
    }

    pub fn alt_mollifier(&self) -> Result<Mollifier<f64>> {
        Mollifier::with_sharpness(self.mollifier.alt_sharpness)
            .map_err(|e| Error::config("mollifier.alt_sharpness", e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid1D<f64>> {
        let g = &self.grid;
        let built = match (g.dx, g.n) {
            (Some(dx), None) => Grid1D::with_spacing(g.xmin, g.xmax, dx, g.periodic),
            (None, Some(n)) => Grid1D::new(g.xmin, g.xmax, n, g.periodic),
            _ => return Err(Error::config("grid.dx", "set exactly one of grid.dx and grid.n")),
        };
        built.map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn pulse(&self) -> Result<PulseSpec<f64>> {
        let p = &self.pulse;
        let spec = match p.kind.as_str() {
            "gaussian" => PulseSpec::Gaussian {
                center: p.center,
                width: p.width,
            },
            "lorentzian" => PulseSpec::Lorentzian { scale: p.scale },
            other => {
                return Err(Error::config(
                    "pulse.kind",
                    format!("unknown kind `{other}`; expected gaussian or lorentzian"),
                ))
            }
        };
        spec.validate().map_err(|e| Error::config("pulse", e.to_string()))?;
        Ok(spec)
    }

    pub fn cone_guard(&self) -> Result<ConeGuard> {
        match self.run.cone_guard.as_str() {
            "error" => Ok(ConeGuard::Error),
            "warn" => Ok(ConeGuard::Warn),
            "off" => Ok(ConeGuard::Off),
            other => Err(Error::config(
                "run.cone_guard",
                format!("unknown mode `{other}`; expected error, warn or off"),
            )),
        }
    }

    /// Solver configuration of the `[run]` section, validated.
    pub fn solver_config(&self) -> Result<SolverConfig<f64>> {
        let mut cfg = SolverConfig::new(self.grid()?, self.coefficient()?, self.pulse()?);
        cfg.mollifier = self.mollifier()?;
        cfg.time_step = match self.run.dt {
            Some(dt) => TimeStep::Fixed(dt),
            None => TimeStep::Cfl(self.run.cfl),
        };
        cfg.t_end = self.run.t_end;
        cfg.epsilon = self.run.epsilon;
        cfg.snapshot_times = self.run.snapshot_times.clone();
        cfg.diag_every = self.run.diag_every;
        cfg.cfl_max = self.run.cfl_max;
        cfg.cone_guard = self.cone_guard()?;
        cfg.cone_threshold = self.run.cone_threshold;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn echo_options(&self) -> EchoOptions<f64> {
        let e = &self.experiment;
        EchoOptions {
            min_fraction: e.echo_min_fraction,
            persistence: e.echo_persistence,
            max_spacing: e.echo_max_spacing,
            min_speed: e.echo_min_speed,
        }
    }

    pub fn dashboard_options(&self) -> DashboardOptions<f64> {
        let e = &self.experiment;
        DashboardOptions {
            sobolev_order: e.sobolev_order,
            sample_interval: e.sample_interval,
            case_samples: e.case_samples,
        }
    }

    /// `experiment.window` as an increasing pair.
    pub fn window(&self) -> Result<(f64, f64)> {
        let [a, b] = self.experiment.window;
        if !(b > a) {
            return Err(Error::config("experiment.window", format!("[{a}, {b}] is empty")));
        }
        Ok((a, b))
    }

    /// `experiment.epsilons`, all positive.
    pub fn epsilons(&self) -> Result<Vec<f64>> {
        let eps = self.experiment.epsilons.clone();
        if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::config("experiment.epsilons", "need positive values"));
        }
        Ok(eps)
    }
}
