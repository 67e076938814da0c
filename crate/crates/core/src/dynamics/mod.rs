//! Schrödinger and Lindblad propagation with observables sampled on a
//! uniform grid.

mod initial;
mod integrator;
mod lindblad;
mod schrodinger;
mod simulate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Frame, HilbertSpace, Mode, OperatorMatrix};

pub use initial::{build_initial_state, InitialStateSpec, StateTerm};
pub use integrator::IntegratorStats;
pub use lindblad::{propagate_lindblad, NEGATIVITY_TOLERANCE};
pub use schrodinger::propagate_schrodinger;
pub use simulate::SimulationSetup;

/// Default relative tolerance of the adaptive integrator.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Absolute tolerance as a fraction of the relative one; amplitudes are
/// bounded by one.
const ATOL_RATIO: f64 = 1e-3;

const MAX_STEPS: u64 = 200_000_000;

/// Name of the norm (pure) or trace (density) series.
pub const NORM_SERIES: &str = "norm";

/// Uniform sampling grid and integrator tolerance, in units of `1/nu_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub n_samples: usize,
    pub tolerance: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, n_samples: usize) -> Result<Self> {
        Self::with_tolerance(t0, t1, n_samples, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(t0: f64, t1: f64, n_samples: usize, tolerance: f64) -> Result<Self> {
        let grid = Self {
            t0,
            t1,
            n_samples,
            tolerance,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 > self.t0) {
            return Err(Error::InvalidParameter(format!(
                "time grid needs t1 > t0, got [{}, {}]",
                self.t0, self.t1
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "time grid needs at least 2 samples, got {}",
                self.n_samples
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "integrator tolerance must lie in (0, 1e-3], got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.t1 - self.t0) / (self.n_samples - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.spacing();
        (0..self.n_samples)
            .map(|k| {
                if k + 1 == self.n_samples {
                    self.t1
                } else {
                    self.t0 + k as f64 * dt
                }
            })
            .collect()
    }

    pub(crate) fn tolerances(&self) -> integrator::Tolerances {
        integrator::Tolerances {
            rtol: self.tolerance,
            atol: self.tolerance * ATOL_RATIO,
            max_steps: MAX_STEPS,
        }
    }
}

/// Named operator whose expectation value is recorded.
#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub op: OperatorMatrix,
}

impl Observable {
    pub fn new(name: impl Into<String>, op: OperatorMatrix) -> Self {
        Self {
            name: name.into(),
            op,
        }
    }

    /// `n_<mode>` for one mode.
    pub fn occupation(space: HilbertSpace, mode: Mode) -> Self {
        Self::new(
            format!("n_{}", mode.label()),
            OperatorMatrix::number(space, mode),
        )
    }

    /// Occupation numbers of all four modes.
    pub fn occupations(space: HilbertSpace) -> Vec<Self> {
        Mode::ALL
            .iter()
            .map(|&m| Self::occupation(space, m))
            .collect()
    }

    /// Population of the highest retained Fock level of `mode`.
    pub fn top_population(space: HilbertSpace, mode: Mode) -> Self {
        Self::new(
            format!("top_{}", mode.label()),
            OperatorMatrix::top_occupation_projector(space, mode),
        )
    }
}

/// Sampled observables of one propagation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    names: Vec<String>,
    series: Vec<Vec<f64>>,
    frame: Frame,
    stats: IntegratorStats,
    warnings: Vec<String>,
}

impl Trajectory {
    fn new(times: Vec<f64>, observables: &[Observable], frame: Frame) -> Self {
        let mut names: Vec<String> = observables.iter().map(|o| o.name.clone()).collect();
        names.push(NORM_SERIES.to_string());
        let series = vec![Vec::with_capacity(times.len()); names.len()];
        Self {
            times,
            names,
            series,
            frame,
            stats: IntegratorStats::default(),
            warnings: Vec::new(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Series names in column order; the norm/trace series is last.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn series(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.series[k].as_slice())
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(self.series.iter().map(Vec::as_slice))
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn stats(&self) -> &IntegratorStats {
        &self.stats
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Largest deviation of the norm (pure) or trace (density) from its
    /// initial value.
    pub fn norm_drift(&self) -> f64 {
        let norm = &self.series[self.series.len() - 1];
        let first = norm.first().copied().unwrap_or(1.0);
        norm.iter().fold(0.0, |m, v| m.max((v - first).abs()))
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_observables(space: &HilbertSpace, observables: &[Observable]) -> Result<()> {
    for o in observables {
        if o.op.space() != space {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: o.op.dim(),
            });
        }
        if o.name == NORM_SERIES {
            return Err(Error::InvalidParameter(format!(
                "observable name '{NORM_SERIES}' is reserved"
            )));
        }
    }
    Ok(())
}
