use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Scenario, PARAM_KEYS};
use super::runner::ScenarioResult;
use crate::analysis::ConvergenceReport;
use crate::dynamics::{IntegratorStats, Trajectory};
use crate::error::Result;
use crate::fock::Mode;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 12 significant digits.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Comment block naming the scenario, model and parameter provenance.
pub fn provenance_header(scenario: &Scenario) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# nanobeam {VERSION}");
    let _ = writeln!(
        s,
        "# scenario: {}{}",
        scenario.name,
        scenario
            .preset
            .as_deref()
            .map(|p| format!(" (preset {p})"))
            .unwrap_or_default()
    );
    let _ = writeln!(
        s,
        "# regime: {}, f_mode: {}, series_order: {}, losses: {}",
        scenario.regime.regime,
        match scenario.regime.f_mode {
            crate::model::FMode::Exact => "exact",
            crate::model::FMode::LeadingOrder => "leading-order",
        },
        scenario.regime.series_order,
        scenario.losses
    );
    let _ = writeln!(s, "# frame: {}", scenario.regime.regime.frame().label());
    let _ = writeln!(s, "# cutoffs: {:?}", scenario.cutoffs);
    let _ = writeln!(
        s,
        "# time unit: 1/nu1, nu1 = {} rad/s",
        num(scenario.params.nu[0])
    );
    let values = super::config::ParamsSection::from_params(&scenario.params);
    let table = toml::Value::try_from(&values).ok();
    for key in PARAM_KEYS {
        let v = table
            .as_ref()
            .and_then(|t| t.get(key))
            .and_then(|v| v.as_float())
            .unwrap_or(0.0);
        let tag = scenario
            .provenance
            .get(key)
            .map(|p| p.label())
            .unwrap_or("default");
        let _ = writeln!(s, "# {key} = {} [{tag}]", num(v));
    }
    s
}

/// Trajectory CSV: time, the requested observables and the norm (trace for
/// density matrices) as the last column.
pub fn trajectory_csv(scenario: &Scenario, traj: &Trajectory) -> Result<String> {
    let mut columns: Vec<(&str, &[f64])> = Vec::new();
    for name in &scenario.output.observables {
        columns.push((name.as_str(), traj.series(name)?));
    }
    columns.push(("norm", traj.series(crate::dynamics::NORM_SERIES)?));
    let mut s = provenance_header(scenario);
    s.push_str("t_per_nu1");
    for (name, _) in &columns {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for (k, t) in traj.times().iter().enumerate() {
        s.push_str(&num(*t));
        for (_, col) in &columns {
            s.push(',');
            s.push_str(&num(col[k]));
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn periods_csv(result: &ScenarioResult) -> String {
    let mut s = provenance_header(&result.scenario);
    s.push_str(
        "kind,observable,predicted_per_nu1,measured_per_nu1,uncertainty_per_nu1,relative_error,note\n",
    );
    for p in &result.periods {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.kind,
            p.observable,
            opt_num(p.predicted),
            opt_num(p.measured.as_ref().map(|m| m.period)),
            opt_num(p.measured.as_ref().map(|m| m.uncertainty)),
            opt_num(p.relative_error()),
            p.note.as_deref().unwrap_or("").replace(',', ";")
        );
    }
    s
}

/// Difference `main - other` of every compared observable.
pub fn comparison_csv(result: &ScenarioResult) -> Result<Option<String>> {
    let Some(cmp) = &result.comparison else {
        return Ok(None);
    };
    let mut s = provenance_header(&result.scenario);
    let _ = writeln!(s, "# compared with regime: {}", cmp.regime);
    s.push_str("t_per_nu1");
    let mut cols = Vec::new();
    for name in &result.scenario.output.observables {
        let _ = write!(s, ",d_{name}");
        cols.push((
            result.trajectory.series(name)?,
            cmp.trajectory.series(name)?,
        ));
    }
    s.push('\n');
    for (k, t) in result.trajectory.times().iter().enumerate() {
        s.push_str(&num(*t));
        for (a, b) in &cols {
            s.push(',');
            s.push_str(&num(a[k] - b[k]));
        }
        s.push('\n');
    }
    Ok(Some(s))
}

pub fn scan_csv(scenario: &Scenario, report: &ConvergenceReport) -> String {
    let mut s = provenance_header(scenario);
    let _ = writeln!(
        s,
        "# scan tolerance: {}, converged at rung: {}, leak detected: {}",
        num(report.tolerance),
        report
            .converged_at
            .map(|k| k.to_string())
            .unwrap_or_else(|| "none".to_string()),
        report.leak_detected
    );
    s.push_str("rung");
    for m in Mode::ALL {
        let _ = write!(s, ",cutoff_{}", m.label());
    }
    s.push_str(",series_order");
    for m in Mode::ALL {
        let _ = write!(s, ",final_n_{}", m.label());
    }
    s.push_str(",max_top_population,leak_time_per_nu1,change,converged\n");
    for (k, row) in report.rows.iter().enumerate() {
        let _ = write!(s, "{k}");
        for c in row.cutoffs {
            let _ = write!(s, ",{c}");
        }
        let _ = write!(s, ",{}", row.series_order);
        for v in row.final_occupations {
            let _ = write!(s, ",{}", num(v));
        }
        let _ = writeln!(
            s,
            ",{},{},{},{}",
            num(row.max_top_population),
            opt_num(row.leak_time),
            opt_num(row.change),
            row.converged
        );
    }
    s
}

#[derive(Serialize)]
struct PeriodRecord {
    kind: String,
    observable: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_per_nu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measured_per_nu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_error: Option<f64>,
}

#[derive(Serialize)]
struct RunRecord {
    version: &'static str,
    frame: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    norm_drift: f64,
    integrator: IntegratorStats,
    warnings: Vec<String>,
    provenance: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    periods: Vec<PeriodRecord>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    max_deviation: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct RunOnly<'a> {
    run: &'a RunRecord,
}

/// Metadata record: the resolved configuration (readable back as a config)
/// followed by a `[run]` table with integrator statistics and provenance.
pub fn metadata_toml(result: &ScenarioResult) -> String {
    let scenario = &result.scenario;
    let mut s = format!(
        "# Resolved configuration of '{}'; pass this file to --config to rerun.\n",
        scenario.name
    );
    s.push_str(&toml::to_string(&scenario.to_layer()).unwrap_or_default());
    let record = RunRecord {
        version: VERSION,
        frame: result.trajectory.frame().label(),
        preset: scenario.preset.clone(),
        norm_drift: result.trajectory.norm_drift(),
        integrator: *result.trajectory.stats(),
        warnings: result.trajectory.warnings().to_vec(),
        provenance: scenario
            .provenance
            .iter()
            .map(|(k, v)| (k.clone(), v.label().to_string()))
            .collect(),
        periods: result
            .periods
            .iter()
            .map(|p| PeriodRecord {
                kind: p.kind.clone(),
                observable: p.observable.clone(),
                predicted_per_nu1: p.predicted,
                measured_per_nu1: p.measured.as_ref().map(|m| m.period),
                relative_error: p.relative_error(),
            })
            .collect(),
        max_deviation: result
            .comparison
            .as_ref()
            .map(|c| c.max_deviation.iter().cloned().collect())
            .unwrap_or_default(),
    };
    s.push('\n');
    s.push_str(&toml::to_string(&RunOnly { run: &record }).unwrap_or_default());
    s
}

/// Files of one scenario run, as `(file name, contents)`.
pub fn scenario_files(result: &ScenarioResult) -> Result<Vec<(String, String)>> {
    let name = &result.scenario.name;
    let mut files = vec![
        (
            format!("{name}.csv"),
            trajectory_csv(&result.scenario, &result.trajectory)?,
        ),
        (format!("{name}.meta.toml"), metadata_toml(result)),
    ];
    if result.scenario.output.periods {
        files.push((format!("{name}.periods.csv"), periods_csv(result)));
    }
    if let Some(cmp) = comparison_csv(result)? {
        files.push((format!("{name}.compare.csv"), cmp));
    }
    Ok(files)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Writes all files into `dir`, creating it if needed; returns their paths.
pub fn write_files(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        write_atomic(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}
