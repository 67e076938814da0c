use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nanobeam::error::{Error, Result};
use nanobeam::parallel::{configure_threads, Execution};
use nanobeam::scenario::{
    presets, run_batch, run_scan, scan_csv, scenario_files, write_files, Scenario, ScenarioSource,
};

/// Two-nanobeam optomechanics scenario runner.
#[derive(Debug, Parser)]
#[command(name = "nanobeam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate one or more scenarios and write trajectories and reports.
    Run(SourceArgs),
    /// List the built-in presets.
    Presets,
    /// Run the truncation convergence scan of one or more scenarios.
    Scan(SourceArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Scenario file (TOML). Repeat to run a batch.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    /// Built-in preset run as its own scenario. Repeatable.
    #[arg(long = "preset", value_name = "NAME")]
    presets: Vec<String>,
    /// Output directory, replacing `output.dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Dotted key and TOML value applied to every scenario, e.g.
    /// `params.gamma_rad_per_s=6.28e9`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads for the batch (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

impl SourceArgs {
    fn sources(&self) -> Result<Vec<ScenarioSource>> {
        if self.configs.is_empty() && self.presets.is_empty() {
            return Err(Error::Config(
                "give at least one --config or --preset".to_string(),
            ));
        }
        let base = ScenarioSource {
            overrides: self.overrides.clone(),
            out_dir: self.out.clone(),
            ..Default::default()
        };
        let mut out: Vec<ScenarioSource> = self
            .configs
            .iter()
            .map(|c| ScenarioSource {
                config: Some(c.clone()),
                ..base.clone()
            })
            .collect();
        out.extend(self.presets.iter().map(|p| ScenarioSource {
            preset: Some(p.clone()),
            ..base.clone()
        }));
        Ok(out)
    }

    /// Resolves every scenario before anything runs.
    fn load(&self) -> Result<Vec<Scenario>> {
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(Error::Config("--threads must be at least 1".to_string()));
            }
            configure_threads(n);
        }
        let scenarios = self
            .sources()?
            .iter()
            .map(Scenario::load)
            .collect::<Result<Vec<_>>>()?;
        let mut seen = BTreeSet::new();
        for s in &scenarios {
            if !seen.insert((s.output.dir.clone(), s.name.clone())) {
                return Err(Error::Config(format!(
                    "two scenarios would write '{}' into {}",
                    s.name,
                    s.output.dir.display()
                )));
            }
        }
        Ok(scenarios)
    }
}

fn run(args: &SourceArgs) -> Result<()> {
    let scenarios = args.load()?;
    let results = run_batch(&scenarios, Execution::default());
    let mut first_error = None;
    for (scenario, result) in scenarios.iter().zip(results) {
        match result.and_then(|r| {
            let files = scenario_files(&r)?;
            write_files(&scenario.output.dir, &files)?;
            Ok(r)
        }) {
            Ok(r) => {
                println!(
                    "{}: {} samples, {} steps, norm drift {:.3e}",
                    scenario.name,
                    r.trajectory.len(),
                    r.trajectory.stats().accepted_steps,
                    r.trajectory.norm_drift()
                );
                for p in &r.periods {
                    if let (Some(pred), Some(m)) = (p.predicted, &p.measured) {
                        println!(
                            "  {} ({}): predicted {:.6e}, measured {:.6e} ({:+.3e})",
                            p.kind,
                            p.observable,
                            pred,
                            m.period,
                            (m.period - pred) / pred
                        );
                    }
                }
                if let Some(c) = &r.comparison {
                    for (name, dev) in &c.max_deviation {
                        println!("  max |{name} - {name}[{}]| = {dev:.3e}", c.regime);
                    }
                }
            }
            Err(e) => {
                eprintln!("{}: error: {e}", scenario.name);
                first_error.get_or_insert(e);
            }
        }
    }
    first_error.map_or(Ok(()), Err)
}

fn scan(args: &SourceArgs) -> Result<()> {
    let scenarios = args.load()?;
    for scenario in &scenarios {
        let report = run_scan(scenario, Execution::default())?;
        let file = format!("{}.scan.csv", scenario.name);
        write_files(&scenario.output.dir, &[(file, scan_csv(scenario, &report))])?;
        println!(
            "{}: converged at rung {}, leak detected: {}",
            scenario.name,
            report
                .converged_at
                .map(|k| k.to_string())
                .unwrap_or_else(|| "none".to_string()),
            report.leak_detected
        );
    }
    Ok(())
}

fn list_presets() {
    for p in presets::all() {
        println!("{:<16}{}", p.name, p.description);
        println!("{:<16}provenance: {}", "", p.notes);
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Presets => {
            list_presets();
            Ok(())
        }
        Command::Scan(args) => scan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
