//! Scenario configuration, built-in presets, batch runner and CSV/metadata
//! output used by the command-line tool.
//!
//! A scenario is assembled from up to three layers: a preset, a TOML file and
//! `--override KEY=VALUE` flags, later layers winning. Physical inputs carry
//! their unit in the key name (`nu1_rad_per_s`); times are in units of
//! `1/nu_1` (`t_end_per_nu1`).

mod config;
mod output;
pub mod presets;
mod runner;

pub use config::{
    parse_override, ConfigLayer, InitialConfig, OutputSpec, Provenance, ScanSpec, Scenario,
    ScenarioSource, TermConfig, PARAM_KEYS, REGIME_TOLERANCE,
};
pub use output::{
    comparison_csv, metadata_toml, periods_csv, provenance_header, scan_csv, scenario_files,
    trajectory_csv, write_atomic, write_files, VERSION,
};
pub use presets::Preset;
pub use runner::{
    run_batch, run_scan, run_scenario, PeriodComparison, RegimeComparison, ScenarioResult,
};
