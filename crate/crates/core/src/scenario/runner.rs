use serde::Serialize;

use super::config::Scenario;
use crate::analysis::{
    convergence_scan, envelope_period, extract_period, period_mec, period_om, period_optical_bs,
    ConvergenceReport, PeakOptions, PeriodEstimate, PeriodPrediction,
};
use crate::dynamics::{Observable, SimulationSetup, Trajectory};
use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, Mode, Nanobeam};
use crate::model::{ModelParams, Regime, RegimeSpec};
use crate::parallel::Execution;

/// Simulated against predicted exchange period, in units of `1/nu_1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodComparison {
    pub kind: String,
    pub observable: String,
    /// Predicted population-oscillation period.
    pub predicted: Option<f64>,
    pub measured: Option<PeriodEstimate>,
    /// Why a value is missing.
    pub note: Option<String>,
}

impl PeriodComparison {
    pub fn relative_error(&self) -> Option<f64> {
        match (self.predicted, &self.measured) {
            (Some(p), Some(m)) => Some((m.period - p) / p),
            _ => None,
        }
    }
}

/// Deviation of the main run from a propagation under another regime.
#[derive(Clone, Debug)]
pub struct RegimeComparison {
    pub regime: Regime,
    pub trajectory: Trajectory,
    /// Largest absolute difference per compared observable.
    pub max_deviation: Vec<(String, f64)>,
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub trajectory: Trajectory,
    pub periods: Vec<PeriodComparison>,
    pub comparison: Option<RegimeComparison>,
}

fn extra_observables(names: &[String]) -> impl Fn(HilbertSpace) -> Vec<Observable> + '_ {
    move |space| {
        Mode::ALL
            .iter()
            .filter(|m| names.iter().any(|n| *n == format!("top_{}", m.label())))
            .map(|&m| Observable::top_population(space, m))
            .collect()
    }
}

/// Propagates one scenario and evaluates the requested reports.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioResult> {
    let setup = scenario.setup();
    let trajectory = setup.run(
        scenario.cutoffs,
        scenario.regime.series_order,
        extra_observables(&scenario.output.observables),
    )?;
    for w in trajectory.warnings() {
        log::warn!("{}: {w}", scenario.name);
    }
    let periods = if scenario.output.periods {
        period_report(scenario, &setup, &trajectory)
    } else {
        Vec::new()
    };
    let comparison = match scenario.output.compare_with {
        Some(regime) => Some(compare(scenario, &setup, &trajectory, regime)?),
        None => None,
    };
    Ok(ScenarioResult {
        scenario: scenario.clone(),
        trajectory,
        periods,
        comparison,
    })
}

/// Runs independent scenarios, in parallel when `execution` allows; results
/// keep the input order.
pub fn run_batch(scenarios: &[Scenario], execution: Execution) -> Vec<Result<ScenarioResult>> {
    execution.map(scenarios.iter().collect(), run_scenario)
}

/// Convergence scan over the scenario's cutoff and series-order ladders.
pub fn run_scan(scenario: &Scenario, execution: Execution) -> Result<ConvergenceReport> {
    convergence_scan(
        &scenario.setup(),
        &scenario.scan.cutoffs,
        &scenario.scan.series_orders,
        scenario.scan.tolerance,
        execution,
    )
}

/// Mechanical occupations of the initial state, rounded to the nearest
/// integer, at which the closed forms are evaluated.
fn initial_mechanical_occupations(setup: &SimulationSetup) -> [u64; 2] {
    let total: f64 = setup
        .initial
        .terms
        .iter()
        .map(|t| t.amplitude[0].powi(2) + t.amplitude[1].powi(2))
        .sum();
    let mut out = [0u64; 2];
    for (k, slot) in out.iter_mut().enumerate() {
        let mean: f64 = setup
            .initial
            .terms
            .iter()
            .map(|t| {
                (t.amplitude[0].powi(2) + t.amplitude[1].powi(2)) * t.occupations[2 + k] as f64
            })
            .sum::<f64>()
            / total.max(f64::MIN_POSITIVE);
        *slot = mean.round() as u64;
    }
    out
}

fn comparison(
    kind: String,
    observable: &str,
    prediction: Result<PeriodPrediction>,
    measure: impl FnOnce(f64) -> Result<PeriodEstimate>,
) -> PeriodComparison {
    match prediction {
        Ok(p) => {
            let predicted = p.population_period();
            let (measured, note) = match measure(predicted) {
                Ok(m) => (Some(m), None),
                Err(e) => (None, Some(e.to_string())),
            };
            PeriodComparison {
                kind,
                observable: observable.to_string(),
                predicted: Some(predicted),
                measured,
                note,
            }
        }
        Err(e) => PeriodComparison {
            kind,
            observable: observable.to_string(),
            predicted: None,
            measured: None,
            note: Some(e.to_string()),
        },
    }
}

fn period_report(
    scenario: &Scenario,
    setup: &SimulationSetup,
    traj: &Trajectory,
) -> Vec<PeriodComparison> {
    let p: &ModelParams = &setup.params;
    let [n1, n2] = initial_mechanical_occupations(setup);
    let mut out = Vec::new();
    match scenario.regime.regime {
        Regime::Omc | Regime::Oms => {
            for beam in Nanobeam::BOTH {
                let n = if beam == Nanobeam::One { n1 } else { n2 };
                let obs = format!("n_{}", beam.optical().label());
                out.push(comparison(
                    format!("optomech-exchange-{}", beam.index() + 1),
                    &obs,
                    period_om(p, beam, n),
                    |_| extract_period(traj, &obs),
                ));
            }
            if scenario.regime.regime == Regime::Omc {
                let fast = period_om(p, Nanobeam::One, n1).map(|t| t.population_period());
                let times = traj.times();
                out.push(comparison(
                    "mechanical-exchange".to_string(),
                    "n_mec1",
                    period_mec(p, n1, n2),
                    |_| {
                        let fast = fast?;
                        envelope_period(times, traj.series("n_mec1")?, fast, PeakOptions::default())
                    },
                ));
            }
        }
        _ => {
            out.push(comparison(
                "optical-exchange".to_string(),
                "n_opt1",
                period_optical_bs(p, n1, n2),
                |_| extract_period(traj, "n_opt1"),
            ));
        }
    }
    out
}

fn compare(
    scenario: &Scenario,
    setup: &SimulationSetup,
    main: &Trajectory,
    regime: Regime,
) -> Result<RegimeComparison> {
    let other = SimulationSetup {
        regime: RegimeSpec {
            regime,
            ..scenario.regime
        },
        ..setup.clone()
    };
    let trajectory = other.run(
        scenario.cutoffs,
        scenario.regime.series_order,
        extra_observables(&scenario.output.observables),
    )?;
    let mut max_deviation = Vec::new();
    for name in &scenario.output.observables {
        let a = main.series(name)?;
        let b = trajectory.series(name)?;
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let dev = a
            .iter()
            .zip(b)
            .fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
        max_deviation.push((name.clone(), dev));
    }
    Ok(RegimeComparison {
        regime,
        trajectory,
        max_deviation,
    })
}
