use dissipwave::coefficient::BreakpointFunction;
use dissipwave::config::RunConfig;
use dissipwave::initial_data::PulseSpec;
use dissipwave::solver_fd::{self, ConeGuard, Grid1D, SolverConfig, TimeStep};
use dissipwave::solver_fourier::run_oracle;
use dissipwave::experiments as presets;
use dissipwave::output;

fn periodic_wrap(x: f64, xmin: f64, span: f64) -> f64 {
    (x - xmin).rem_euclid(span) + xmin
}

fn constant_run<T: dissipwave::scalar::Real>(dx: f64) -> SolverConfig<T> {
    let grid = Grid1D::with_spacing(T::lit(-8.0), T::lit(8.0), T::lit(dx), true).unwrap();
    let mut cfg = SolverConfig::new(grid, BreakpointFunction::constant(T::lit(2.0)), PulseSpec::paper_gaussian());
    cfg.time_step = TimeStep::Fixed(T::lit(0.4 * dx));
    cfg.t_end = T::lit(3.0);
    cfg.snapshot_times = vec![T::lit(3.0)];
    cfg.cone_guard = ConeGuard::Off;
    cfg
}

#[test]
fn constant_coefficient_matches_dalembert() {
    // d'Alembert with u_t(0) = −f'/b: u = ((1 + 1/b) f(x − t) + (1 − 1/b) f(x + t)) / 2.
    let cfg = constant_run::<f64>(0.02);
    let traj = solver_fd::run(&cfg).unwrap();
    let snap = traj.final_snapshot().unwrap();
    let grid = traj.grid();
    let err = (0..grid.len())
        .map(|i| {
            let f = |x: f64| {
                let x = periodic_wrap(x, -8.0, 16.0);
                (-x * x / 0.3).exp()
            };
            let x = grid.node(i);
            let exact = 0.5 * (1.5 * f(x - snap.time) + 0.5 * f(x + snap.time));
            (snap.fields.u[i] - exact).abs()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "sup error {err}");
}

#[test]
fn single_precision_follows_double() {
    let t64 = solver_fd::run(&constant_run::<f64>(0.04)).unwrap();
    let t32 = solver_fd::run(&constant_run::<f32>(0.04)).unwrap();
    let u64 = &t64.final_snapshot().unwrap().fields.u;
    let u32 = &t32.final_snapshot().unwrap().fields.u;
    assert_eq!(u64.len(), u32.len());
    let diff = u64.iter().zip(u32).map(|(a, b)| (a - *b as f64).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-4, "{diff}");
}

#[test]
fn finite_difference_and_spectral_agree_across_the_jump() {
    let text = r#"
[grid]
xmin = -15.0
xmax = 25.0
dx = 0.02
[run]
dt = 0.008
t_end = 8.0
epsilon = 0.2
snapshot_times = [8.0]
cone_guard = "off"
"#;
    let cfg = RunConfig::from_toml_str(text).unwrap().solver_config().unwrap();
    let fd = solver_fd::run(&cfg).unwrap();
    let spectral = run_oracle(&cfg, None).unwrap();
    let a = &fd.final_snapshot().unwrap().fields.u;
    let b = &spectral.trajectory.final_snapshot().unwrap().fields.u;
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let peak = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(diff < 1e-3 * peak, "difference {diff} against peak {peak}");
}

#[test]
fn default_config_matches_the_reference_setup() {
    let cfg = RunConfig::default().solver_config().unwrap();
    let preset = presets::paper_gaussian(0.01);
    assert_eq!(cfg.grid.len(), preset.grid.len());
    assert_eq!(cfg.grid.len(), 7018);
    assert!((cfg.dt() - 0.0067).abs() < 1e-15);
    assert_eq!(cfg.t_end, 60.0);
    assert_eq!(cfg.epsilon, Some(0.01));
    assert_eq!(cfg.snapshot_times, preset.snapshot_times);
}

#[test]
fn written_snapshot_reads_back() {
    let cfg = constant_run::<f64>(0.1);
    let traj = solver_fd::run(&cfg).unwrap();
    let snap = traj.final_snapshot().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = output::write_snapshot(dir.path(), traj.grid(), snap, Some(0.05)).unwrap();
    assert_eq!(path.file_name().unwrap(), "snap_t3.0000_eps0.05.csv");
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["x", "p", "u"]);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), traj.grid().len());
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], traj.grid().node(i));
        assert_eq!(row[1], snap.fields.p[i]);
        assert_eq!(row[2], snap.fields.u[i]);
    }
}
