use serde::Serialize;

use crate::dynamics::{Observable, SimulationSetup};
use crate::error::{Error, Result};
use crate::fock::{Mode, Occupations};
use crate::parallel::Execution;

/// Highest-Fock-level population above which a truncation counts as leaking.
pub const LEAK_THRESHOLD: f64 = 1e-6;

/// One refinement step of a convergence scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub cutoffs: Occupations,
    pub series_order: usize,
    /// Occupation numbers at the final time, in mode order.
    pub final_occupations: [f64; 4],
    /// Largest population of the top retained level of any mode that can be
    /// excited (cutoff >= 1), over the whole run.
    pub max_top_population: f64,
    /// First time the top-level population exceeded [`LEAK_THRESHOLD`].
    pub leak_time: Option<f64>,
    /// Largest change of the final occupations against the previous rung.
    pub change: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ScanRow>,
    pub tolerance: f64,
    /// Index of the first converged rung.
    pub converged_at: Option<usize>,
    /// Whether any rung exceeded the truncation-leak threshold.
    pub leak_detected: bool,
}

fn strictly_increasing_cutoffs(ladder: &[Occupations]) -> bool {
    ladder
        .windows(2)
        .all(|w| (0..4).all(|k| w[1][k] >= w[0][k]) && (0..4).any(|k| w[1][k] > w[0][k]))
}

/// Propagates the scenario on successively larger truncations.
///
/// Rung `k` uses `cutoff_ladder[min(k, len-1)]` and
/// `order_ladder[min(k, len-1)]`. A rung is converged when its truncation
/// does not leak and (except for the first rung) its final occupations differ
/// from the previous rung's by less than `tolerance`.
pub fn convergence_scan(
    setup: &SimulationSetup,
    cutoff_ladder: &[Occupations],
    order_ladder: &[usize],
    tolerance: f64,
    execution: Execution,
) -> Result<ConvergenceReport> {
    if cutoff_ladder.is_empty() || order_ladder.is_empty() {
        return Err(Error::InvalidParameter(
            "scan ladders must not be empty".to_string(),
        ));
    }
    if !strictly_increasing_cutoffs(cutoff_ladder) {
        return Err(Error::InvalidParameter(
            "cutoff ladder must increase strictly from rung to rung".to_string(),
        ));
    }
    if !order_ladder.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter(
            "series-order ladder must increase strictly".to_string(),
        ));
    }
    let rungs = cutoff_ladder.len().max(order_ladder.len());
    let jobs: Vec<(Occupations, usize)> = (0..rungs)
        .map(|k| {
            (
                cutoff_ladder[k.min(cutoff_ladder.len() - 1)],
                order_ladder[k.min(order_ladder.len() - 1)],
            )
        })
        .collect();

    let results = execution.map(jobs.clone(), |(cutoffs, order)| {
        setup.run(cutoffs, order, |space| {
            Mode::ALL
                .iter()
                .filter(|&&m| space.cutoff(m) >= 1)
                .map(|&m| Observable::top_population(space, m))
                .collect()
        })
    });

    let mut rows: Vec<ScanRow> = Vec::with_capacity(rungs);
    for ((cutoffs, order), traj) in jobs.into_iter().zip(results) {
        let traj = traj?;
        let mut final_occupations = [0.0; 4];
        for m in Mode::ALL {
            let s = traj.series(&format!("n_{}", m.label()))?;
            final_occupations[m.index()] = *s.last().unwrap_or(&0.0);
        }
        let mut max_top: f64 = 0.0;
        let mut leak_time: Option<f64> = None;
        for m in Mode::ALL {
            if cutoffs[m.index()] == 0 {
                continue;
            }
            let s = traj.series(&format!("top_{}", m.label()))?;
            for (t, v) in traj.times().iter().zip(s) {
                max_top = max_top.max(*v);
                if *v > LEAK_THRESHOLD && leak_time.is_none_or(|lt| *t < lt) {
                    leak_time = Some(*t);
                    break;
                }
            }
        }
        let change = rows.last().map(|prev| {
            (0..4).fold(0.0, |acc: f64, k| {
                acc.max((final_occupations[k] - prev.final_occupations[k]).abs())
            })
        });
        let leaks = max_top > LEAK_THRESHOLD;
        let converged = !leaks && change.is_none_or(|c| c < tolerance);
        rows.push(ScanRow {
            cutoffs,
            series_order: order,
            final_occupations,
            max_top_population: max_top,
            leak_time,
            change,
            converged,
        });
    }
    Ok(ConvergenceReport {
        converged_at: rows.iter().position(|r| r.converged),
        leak_detected: rows.iter().any(|r| r.max_top_population > LEAK_THRESHOLD),
        rows,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{InitialStateSpec, TimeGrid};
    use crate::model::{ModelParams, Regime, RegimeSpec};

    fn setup(
        regime: Regime,
        params: ModelParams,
        initial: InitialStateSpec,
        t1: f64,
    ) -> SimulationSetup {
        SimulationSetup {
            params,
            regime: RegimeSpec::new(regime),
            initial,
            grid: TimeGrid::new(0.0, t1, 201).unwrap(),
            losses: false,
        }
    }

    #[test]
    fn vacuum_converges_at_first_rung() {
        let s = setup(
            Regime::Nbs,
            ModelParams::zeroed(),
            InitialStateSpec::vacuum(),
            1.0,
        );
        let report = convergence_scan(
            &s,
            &[[1, 1, 1, 1], [2, 2, 2, 2]],
            &[4],
            1e-8,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(report.converged_at, Some(0));
        assert!(!report.leak_detected || report.rows[0].converged);
    }

    #[test]
    fn single_photon_exchange_converges_at_optical_cutoff_two() {
        let mut p = ModelParams::zeroed();
        p.gamma = 1.0;
        p.g = [0.05, 0.05];
        let s = setup(Regime::Nbs, p, InitialStateSpec::basis([1, 0, 0, 0]), 3.0);
        let report = convergence_scan(
            &s,
            &[[1, 1, 0, 0], [2, 2, 0, 0], [3, 3, 0, 0]],
            &[4],
            1e-6,
            Execution::Parallel,
        )
        .unwrap();
        assert!(!report.rows[0].converged);
        assert_eq!(report.converged_at, Some(1));
        assert_eq!(report.rows[1].cutoffs, [2, 2, 0, 0]);
    }

    #[test]
    fn rejects_non_increasing_ladders() {
        let s = setup(
            Regime::Nbs,
            ModelParams::zeroed(),
            InitialStateSpec::vacuum(),
            1.0,
        );
        assert!(convergence_scan(
            &s,
            &[[1, 1, 1, 1], [1, 1, 1, 1]],
            &[4],
            1e-8,
            Execution::Sequential
        )
        .is_err());
        assert!(
            convergence_scan(&s, &[[1, 1, 1, 1]], &[4, 4], 1e-8, Execution::Sequential).is_err()
        );
    }

    #[test]
    fn capacity_error_propagates() {
        let s = setup(
            Regime::Nbs,
            ModelParams::zeroed(),
            InitialStateSpec::vacuum(),
            1.0,
        );
        let err = convergence_scan(
            &s,
            &[[1000, 1000, 1000, 1000]],
            &[4],
            1e-8,
            Execution::Sequential,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }
}
