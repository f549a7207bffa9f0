use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use dissipwave::coefficient::{BreakpointFunction, ImpedanceProfile};
use dissipwave::config::{RunConfig, SCHEMA_VERSION};
use dissipwave::diagnostics::uniform_bound_summary;
use dissipwave::experiments::{decay_experiment, echo_experiment, refinement_study, sweep_epsilon, theorem_dashboard};
use dissipwave::mollifier::{moderateness_scan, mollifier_sensitivity, TimeCoefficient};
use dissipwave::output::{self, epsilon_label, num, write_table};
use dissipwave::solver_fd::{run, SolverConfig};
use dissipwave::solver_fourier::{mode_energy_series, run_oracle, sobolev_norm};
use dissipwave::{Error, Result};

/// Factor applied to the grid spacing and time step by `--ci`.
const CI_FACTOR: usize = 4;

#[derive(Parser)]
#[command(name = "dissipwave", about = "Dissipative wave equation with a regularized irregular coefficient")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parent of the run directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    /// Override a key, as `section.key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Scale grid spacing and time step by 4.
    #[arg(long)]
    ci: bool,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Single run: snapshots, diagnostics, coefficient and Sobolev norms.
    Simulate(Common),
    /// Sweep over experiment.epsilons: convergence table and bounds.
    Sweep(Common),
    /// Growth of sup |d^k b_eps| as eps decreases.
    Moderateness(Common),
    /// Difference between two mollifiers as eps decreases.
    Sensitivity(Common),
    /// Echo report of the configured run.
    Echo(Common),
    /// Decay fits over experiment.epsilons.
    Decay(Common),
    /// Case classification and measured constants of the decay bounds.
    Dashboard(Common),
    /// Travel-time coordinate and impedance of a layered profile.
    Transform(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
            Command::Moderateness(_) => "moderateness",
            Command::Sensitivity(_) => "sensitivity",
            Command::Echo(_) => "echo",
            Command::Decay(_) => "decay",
            Command::Dashboard(_) => "dashboard",
            Command::Transform(_) => "transform",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c)
            | Command::Sweep(c)
            | Command::Moderateness(c)
            | Command::Sensitivity(c)
            | Command::Echo(c)
            | Command::Decay(c)
            | Command::Dashboard(c)
            | Command::Transform(c) => c,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } => 2,
        Error::Instability { .. } => 3,
        _ => 1,
    }
}

fn effective_config(common: &Common) -> Result<RunConfig> {
    let base = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.with_overrides(&common.overrides)?;
    Ok(if common.ci { cfg.coarsened(CI_FACTOR) } else { cfg })
}

/// Creates `<out>/<command>-<hash>` and writes the effective config into it.
fn run_dir(common: &Common, command: &str, cfg: &RunConfig) -> Result<PathBuf> {
    let dir = common.out.join(format!("{command}-{}", cfg.hash()));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml_string())?;
    Ok(dir)
}

fn write_warnings(dir: &Path, warnings: &[String]) -> Result<()> {
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if !warnings.is_empty() {
        std::fs::write(dir.join("warnings.txt"), warnings.join("\n") + "\n")?;
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let solver = cfg.solver_config()?;
    let traj = run(&solver)?;
    write_warnings(dir, &traj.warnings)?;
    for snap in &traj.snapshots {
        output::write_snapshot(dir, &solver.grid, snap, solver.epsilon)?;
    }
    output::write_diagnostics(&dir.join("diag.csv"), &traj.series)?;
    write_coefficient(cfg, &solver, dir)?;
    if solver.grid.is_periodic() {
        let orders = [0.0, cfg.experiment.sobolev_order];
        let mut rows = Vec::new();
        for snap in &traj.snapshots {
            for &s in &orders {
                rows.push((snap.time, s, sobolev_norm(&snap.fields.u, &solver.grid, s)?));
            }
        }
        output::write_sobolev_series(&dir.join("sobolev.csv"), &rows)?;
    }
    Ok(())
}

fn write_coefficient(cfg: &RunConfig, solver: &SolverConfig<f64>, dir: &Path) -> Result<()> {
    let model = solver.coefficient_model()?;
    let count = cfg.experiment.coefficient_samples.max(2);
    let samples: Vec<_> = (0..count)
        .map(|i| {
            let t = solver.t_end * i as f64 / (count - 1) as f64;
            (t, solver.coefficient.eval_extended(t), model.value(t), model.derivative(t))
        })
        .collect();
    output::write_coefficient(&dir.join("coefficient.csv"), &samples)
}

fn sweep(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let base = cfg.solver_config()?;
    let eps = cfg.epsilons()?;
    let compare = cfg.experiment.compare_time;
    let result = sweep_epsilon(&base, &eps, compare)?;
    output::write_convergence(&dir.join("convergence.csv"), &result.table)?;
    let refs: Vec<_> = result.trajectories.iter().collect();
    let summary = uniform_bound_summary(&refs)?;
    output::write_bound_summary(&dir.join("bounds.csv"), &summary)?;
    let mut warnings = Vec::new();
    for traj in &result.trajectories {
        let label = epsilon_label(traj.info.epsilon);
        warnings.extend(traj.warnings.iter().map(|w| format!("epsilon = {label}: {w}")));
        output::write_diagnostics(&dir.join(format!("diag_eps{label}.csv")), &traj.series)?;
        if let Some(snap) = traj.snapshot_near(compare) {
            output::write_snapshot(dir, &base.grid, snap, traj.info.epsilon)?;
        }
    }
    write_warnings(dir, &warnings)?;
    if cfg.experiment.refinement {
        let mut finest = base.clone();
        finest.epsilon = eps.last().copied();
        let study = refinement_study(&finest, compare)?;
        output::write_refinement(&dir.join("refinement.csv"), &study)?;
    }
    Ok(())
}

fn moderateness(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let report = moderateness_scan(
        &cfg.coefficient()?,
        &cfg.mollifier()?,
        cfg.experiment.derivative_order,
        &cfg.epsilons()?,
        cfg.window()?,
    )
    .map_err(|e| match e {
        Error::Domain(m) => Error::config("experiment.derivative_order", m),
        other => other,
    })?;
    output::write_moderateness(&dir.join("moderateness.csv"), &report)
}

fn sensitivity(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let table = mollifier_sensitivity(
        &cfg.coefficient()?,
        &cfg.mollifier()?,
        &cfg.alt_mollifier()?,
        &cfg.epsilons()?,
        cfg.window()?,
    )?;
    output::write_sensitivity(&dir.join("sensitivity.csv"), &table)
}

fn echo(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let solver = cfg.solver_config()?;
    let exp = echo_experiment(&solver, &cfg.echo_options())?;
    write_warnings(dir, &exp.trajectory.warnings)?;
    for snap in &exp.trajectory.snapshots {
        output::write_snapshot(dir, &solver.grid, snap, solver.epsilon)?;
    }
    output::write_echo(&dir.join("echo.csv"), &[(solver.epsilon, exp.report)])?;
    if exp.report.is_none() {
        eprintln!("no echo found");
    }
    Ok(())
}

fn decay(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let base = cfg.solver_config()?;
    let eps: Vec<Option<f64>> = cfg.epsilons()?.into_iter().map(Some).collect();
    let studies = decay_experiment(&base, &eps, cfg.experiment.decay_start)?;
    output::write_decay(&dir.join("decay.csv"), &studies)?;
    for s in &studies {
        output::write_decay_ratio(&dir.join(format!("decay_ratio_eps{}.csv", epsilon_label(s.epsilon))), s)?;
    }
    Ok(())
}

fn dashboard(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let solver = cfg.solver_config()?;
    let dash = theorem_dashboard(&solver, &cfg.dashboard_options())?;
    output::write_dashboard_summary(&dir.join("dashboard.csv"), &dash)?;
    output::write_dashboard_bounds(&dir.join("dashboard_bounds.csv"), &dash)?;
    output::write_case_samples(&dir.join("case.csv"), &dash.case.samples)?;
    let oracle = run_oracle(&solver, None)?;
    output::write_mode_energy(&dir.join("mode_energy.csv"), &mode_energy_series(&oracle))?;
    for flag in &dash.flags {
        eprintln!("flag: {flag}");
    }
    Ok(())
}

fn layered(left: f64, depths: &[f64], values: &[f64], key: &str) -> Result<BreakpointFunction<f64>> {
    if values.len() != depths.len() + 1 {
        return Err(Error::config(
            key,
            format!("need {} values for {} layer depths", depths.len() + 1, depths.len()),
        ));
    }
    let entries = depths.iter().zip(&values[1..]).map(|(&z, &v)| (z, vec![v])).collect();
    BreakpointFunction::new(left, entries).map_err(|e| Error::config(key, e.to_string()))
}

fn transform(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let e = &cfg.experiment;
    let first = |v: &[f64], key: &str| v.first().copied().ok_or_else(|| Error::config(key, "empty"));
    let density = layered(first(&e.layer_density, "experiment.layer_density")?, &e.layer_depths, &e.layer_density, "experiment.layer_density")?;
    let speed = layered(first(&e.layer_speed, "experiment.layer_speed")?, &e.layer_depths, &e.layer_speed, "experiment.layer_speed")?;
    let profile = ImpedanceProfile::new(density, speed).map_err(|e| Error::config("experiment.layer_depths", e.to_string()))?;
    let count = e.transform_samples.max(2);
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let z = e.transform_depth * i as f64 / (count - 1) as f64;
        rows.push(vec![num(z), num(profile.travel_time(z)?), num(profile.impedance(z)?)]);
    }
    write_table(&dir.join("transform.csv"), &["z", "travel_time", "impedance"], rows)?;
    let b = profile.impedance_in_travel_time()?;
    let mut rows = vec![vec![num(0.0), num(b.left_value())]];
    for (bp, piece) in b.breakpoints().iter().zip(b.pieces()) {
        rows.push(vec![num(*bp), num(piece.eval(*bp))]);
    }
    write_table(&dir.join("impedance_travel_time.csv"), &["x", "b"], rows)
}

fn execute(command: &Command) -> Result<PathBuf> {
    let common = command.common();
    let cfg = effective_config(common)?;
    let fresh = !common.out.join(format!("{}-{}", command.name(), cfg.hash())).exists();
    let dir = run_dir(common, command.name(), &cfg)?;
    let outcome = match command {
        Command::Simulate(_) => simulate(&cfg, &dir),
        Command::Sweep(_) => sweep(&cfg, &dir),
        Command::Moderateness(_) => moderateness(&cfg, &dir),
        Command::Sensitivity(_) => sensitivity(&cfg, &dir),
        Command::Echo(_) => echo(&cfg, &dir),
        Command::Decay(_) => decay(&cfg, &dir),
        Command::Dashboard(_) => dashboard(&cfg, &dir),
        Command::Transform(_) => transform(&cfg, &dir),
    };
    match outcome {
        Ok(()) => Ok(dir),
        Err(e) => {
            if fresh {
                let _ = std::fs::remove_dir_all(&dir);
            }
            Err(e)
        }
    }
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(
        format!("{} (config schema {SCHEMA_VERSION})", env!("CARGO_PKG_VERSION")).into_boxed_str(),
    );
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Some(jobs) = cli.command.common().jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: cannot set up {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(&cli.command) {
        Ok(dir) => {
            println!("{}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
