//! CSV layouts of the run directory.
//!
//! Numbers are written as `{:.16e}`. An absent value is an empty field,
//! except the fitted exponent of an identically vanishing net, which is the
//! literal `identically_zero`.

use std::path::{Path, PathBuf};

use crate::diagnostics::{BoundSummary, EchoReport};
use crate::error::Result;
use crate::experiments::{ConvergenceTable, Dashboard, DecayStudy, RefinementStudy};
use crate::mollifier::{CoefficientSample, ModeratenessReport, ScalingExponent, SensitivityTable};
use crate::scalar::Real;
use crate::solver_fd::{DiagnosticSample, Grid1D, Snapshot};
use crate::solver_fourier::ModeEnergyTable;

pub fn num<T: Real>(v: T) -> String {
    format!("{:.16e}", v.to_f64_lossy())
}

fn opt<T: Real>(v: Option<T>) -> String {
    v.map(num).unwrap_or_default()
}

fn exponent<T: Real>(e: &ScalingExponent<T>) -> String {
    match e.exponent() {
        Some(v) => num(v),
        None => "identically_zero".into(),
    }
}

/// `ε` as it appears in file names: shortest round-trip decimal, or `none`.
pub fn epsilon_label<T: Real>(epsilon: Option<T>) -> String {
    match epsilon {
        Some(e) => format!("{}", e.to_f64_lossy()),
        None => "none".into(),
    }
}

/// Writes a header and rows to `path`.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `snap_t{time:.4}_eps{ε}.csv` with columns `x, p, u`.
pub fn write_snapshot<T: Real>(dir: &Path, grid: &Grid1D<T>, snapshot: &Snapshot<T>, epsilon: Option<T>) -> Result<PathBuf> {
    let path = dir.join(format!(
        "snap_t{:.4}_eps{}.csv",
        snapshot.time.to_f64_lossy(),
        epsilon_label(epsilon)
    ));
    let f = &snapshot.fields;
    write_table(
        &path,
        &["x", "p", "u"],
        (0..grid.len()).map(|i| vec![num(grid.node(i)), num(f.p[i]), num(f.u[i])]),
    )?;
    Ok(path)
}

/// `t, l2_u, sup_u, energy`.
pub fn write_diagnostics<T: Real>(path: &Path, series: &[DiagnosticSample<T>]) -> Result<()> {
    write_table(
        path,
        &["t", "l2_u", "sup_u", "energy"],
        series
            .iter()
            .map(|s| vec![num(s.time), num(s.l2_u), num(s.sup_u), num(s.energy)]),
    )
}

/// `t, b, b_eps, b_eps_prime`.
pub fn write_coefficient<T: Real>(path: &Path, samples: &[CoefficientSample<T>]) -> Result<()> {
    write_table(
        path,
        &["t", "b", "b_eps", "b_eps_prime"],
        samples
            .iter()
            .map(|&(t, b, be, bp)| vec![num(t), num(b), num(be), num(bp)]),
    )
}

/// `epsilon, sup_value, fitted_exponent`.
pub fn write_moderateness<T: Real>(path: &Path, report: &ModeratenessReport<T>) -> Result<()> {
    let fitted = exponent(&report.exponent);
    write_table(
        path,
        &["epsilon", "sup_value", "fitted_exponent"],
        report
            .rows
            .iter()
            .map(|r| vec![num(r.epsilon), num(r.sup_value), fitted.clone()]),
    )
}

/// Same layout as the moderateness table, with the sup of the difference.
pub fn write_sensitivity<T: Real>(path: &Path, table: &SensitivityTable<T>) -> Result<()> {
    let fitted = exponent(&table.exponent);
    write_table(
        path,
        &["epsilon", "sup_value", "fitted_exponent"],
        table
            .rows
            .iter()
            .map(|r| vec![num(r.epsilon), num(r.sup_difference), fitted.clone()]),
    )
}

/// `t, k, xi, energy`, one row per snapshot and mode.
pub fn write_mode_energy<T: Real>(path: &Path, table: &ModeEnergyTable<T>) -> Result<()> {
    let rows = table.times.iter().zip(&table.energy).flat_map(|(t, row)| {
        row.iter()
            .zip(table.k.iter().zip(&table.xi))
            .map(move |(e, (k, xi))| vec![num(*t), k.to_string(), num(*xi), num(*e)])
    });
    write_table(path, &["t", "k", "xi", "energy"], rows)
}

/// `t, s, norm`.
pub fn write_sobolev_series<T: Real>(path: &Path, rows: &[(T, T, T)]) -> Result<()> {
    write_table(
        path,
        &["t", "s", "norm"],
        rows.iter().map(|&(t, s, n)| vec![num(t), num(s), num(n)]),
    )
}

/// `epsilon, birth_time, amp_ratio, width_ratio, direction`; a run without
/// an echo leaves the last four fields empty.
pub fn write_echo<T: Real>(path: &Path, rows: &[(Option<T>, Option<EchoReport<T>>)]) -> Result<()> {
    write_table(
        path,
        &["epsilon", "birth_time", "amp_ratio", "width_ratio", "direction"],
        rows.iter().map(|(eps, r)| match r {
            Some(r) => vec![
                opt(*eps),
                num(r.birth_time),
                num(r.amplitude_ratio),
                num(r.width_ratio),
                num(r.echo_direction),
            ],
            None => vec![opt(*eps), String::new(), String::new(), String::new(), String::new()],
        }),
    )
}

/// `epsilon, slope_t, slope_b, intercept`.
pub fn write_decay<T: Real>(path: &Path, studies: &[DecayStudy<T>]) -> Result<()> {
    write_table(
        path,
        &["epsilon", "slope_t", "slope_b", "intercept"],
        studies.iter().map(|s| {
            vec![
                opt(s.epsilon),
                num(s.fit.slope_t),
                opt(s.fit.slope_b),
                num(s.fit.intercept),
            ]
        }),
    )
}

/// `t, l2_u, b_eps, l2_times_b` of one decay study.
pub fn write_decay_ratio<T: Real>(path: &Path, study: &DecayStudy<T>) -> Result<()> {
    write_table(
        path,
        &["t", "l2_u", "b_eps", "l2_times_b"],
        study
            .ratio_series
            .iter()
            .map(|&(t, l, b, r)| vec![num(t), num(l), num(b), num(r)]),
    )
}

/// `epsilon, epsilon_next, compare_time, difference, observed_order`.
pub fn write_convergence<T: Real>(path: &Path, table: &ConvergenceTable<T>) -> Result<()> {
    write_table(
        path,
        &["epsilon", "epsilon_next", "compare_time", "difference", "observed_order"],
        table.rows.iter().map(|r| {
            vec![
                num(r.epsilon),
                num(r.epsilon_next),
                num(table.compare_time),
                num(r.difference),
                opt(r.observed_order),
            ]
        }),
    )
}

/// `compare_time, coarse_dx, difference, estimated_error`.
pub fn write_refinement<T: Real>(path: &Path, study: &RefinementStudy<T>) -> Result<()> {
    write_table(
        path,
        &["compare_time", "coarse_dx", "difference", "estimated_error"],
        std::iter::once(vec![
            num(study.compare_time),
            num(study.coarse_dx),
            num(study.difference),
            num(study.estimated_error),
        ]),
    )
}

/// `epsilon, max_l2_u`, followed by the spread on its own row.
pub fn write_bound_summary<T: Real>(path: &Path, summary: &BoundSummary<T>) -> Result<()> {
    let rows = summary
        .rows
        .iter()
        .map(|r| vec![opt(r.epsilon), num(r.max_l2)])
        .chain(std::iter::once(vec!["spread".to_string(), num(summary.spread)]));
    write_table(path, &["epsilon", "max_l2_u"], rows)
}

/// `family, l, alpha, t, lhs, scale, constant` for every bound table.
pub fn write_dashboard_bounds<T: Real>(path: &Path, dash: &Dashboard<T>) -> Result<()> {
    let rows = dash.tables.iter().flat_map(|table| {
        table.entries.iter().map(move |e| {
            vec![
                table.family.to_string(),
                table.l.to_string(),
                table.alpha.to_string(),
                num(e.time),
                num(e.lhs),
                num(e.scale),
                num(e.constant),
            ]
        })
    });
    write_table(path, &["family", "l", "alpha", "t", "lhs", "scale", "constant"], rows)
}

/// `quantity, value` summary of a dashboard.
pub fn write_dashboard_summary<T: Real>(path: &Path, dash: &Dashboard<T>) -> Result<()> {
    let mut rows = vec![
        vec!["case".to_string(), dash.case.case.label().to_string()],
        vec!["sup_t_dissipation".into(), num(dash.case.sup)],
        vec!["sup_last_half".into(), num(dash.case.sup_last_half)],
        vec!["limit_estimate".into(), num(dash.case.limit_estimate)],
        vec!["sobolev_order".into(), num(dash.sobolev_order)],
        vec!["worst_constant".into(), num(dash.worst_constant)],
        vec!["max_mode_growth".into(), num(dash.max_mode_growth)],
    ];
    for table in &dash.tables {
        rows.push(vec![
            format!("worst_{}_l{}_alpha{}", table.family, table.l, table.alpha),
            num(table.worst),
        ]);
    }
    for flag in &dash.flags {
        rows.push(vec!["flag".into(), flag.clone()]);
    }
    write_table(path, &["quantity", "value"], rows)
}

/// `t, t_dissipation` samples of `t·b'_ε/b_ε`.
pub fn write_case_samples<T: Real>(path: &Path, samples: &[(T, T)]) -> Result<()> {
    write_table(
        path,
        &["t", "t_dissipation"],
        samples.iter().map(|&(t, v)| vec![num(t), num(v)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollifier::ModeratenessRow;

    fn read(path: &Path) -> String {
        std::fs::read_to_string(path).unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(num(0.5f64), "5.0000000000000000e-1");
        assert_eq!(num(-3.0f32), "-3.0000000000000000e0");
        assert_eq!(epsilon_label(Some(0.01f64)), "0.01");
        assert_eq!(epsilon_label::<f64>(None), "none");
    }

    #[test]
    fn identically_zero_exponent_is_literal() {
        let dir = tempfile::tempdir().unwrap();
        let report = ModeratenessReport {
            derivative_order: 1,
            window: (0.0f64, 1.0),
            rows: vec![
                ModeratenessRow { epsilon: 0.5, sup_value: 0.0, argmax: 0.0 },
                ModeratenessRow { epsilon: 0.25, sup_value: 0.0, argmax: 0.0 },
            ],
            exponent: ScalingExponent::IdenticallyZero,
        };
        let path = dir.path().join("m.csv");
        write_moderateness(&path, &report).unwrap();
        let text = read(&path);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "epsilon,sup_value,fitted_exponent");
        assert_eq!(lines[1], "5.0000000000000000e-1,0.0000000000000000e0,identically_zero");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn snapshot_file_name_and_columns() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid1D::periodic(0.0f64, 1.0, 8).unwrap();
        let snap = Snapshot {
            requested: 5.0,
            time: 5.00004,
            step: 3,
            fields: crate::solver_fd::FieldPair::zeros(8),
        };
        let path = write_snapshot(dir.path(), &grid, &snap, Some(0.01)).unwrap();
        assert_eq!(path.file_name().unwrap(), "snap_t5.0000_eps0.01.csv");
        let text = read(&path);
        assert_eq!(text.lines().next().unwrap(), "x,p,u");
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn missing_echo_leaves_fields_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("echo.csv");
        write_echo::<f64>(&path, &[(Some(0.1), None)]).unwrap();
        assert_eq!(read(&path).lines().nth(1).unwrap(), "1.0000000000000001e-1,,,,");
    }
}
