//! Hamiltonians of the driven nanobeam pair in each reference frame and
//! sideband regime.

mod builders;
mod hamiltonian;
mod params;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Frame, HilbertSpace};

pub use builders::{
    aux_f, aux_f_leading, beam_splitter, collapse_ops, lab_frame, mechanical_coupler,
    mechanical_squeezer, polaron_series, CollapseOp, FMode,
};
pub use hamiltonian::{Hamiltonian, HamiltonianEvaluator, OscillatingTerm};
pub use params::{ModelParams, SERIES_WARNING_RATIO};

pub use builders::rotating_frame;

/// Default truncation of the polaron series.
pub const DEFAULT_SERIES_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    FullLab,
    Rotating,
    PolaronSeries,
    /// Resonant drive: optical beam splitter.
    Nbs,
    /// Red sideband, `delta = -nu_1 + nu_2`: mechanical coupler.
    Omc,
    /// Red sideband, `delta = -nu_1 - nu_2`: mechanical two-mode squeezing.
    Oms,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::FullLab,
        Regime::Rotating,
        Regime::PolaronSeries,
        Regime::Nbs,
        Regime::Omc,
        Regime::Oms,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Regime::FullLab => "full-lab",
            Regime::Rotating => "rotating",
            Regime::PolaronSeries => "polaron-series",
            Regime::Nbs => "nbs",
            Regime::Omc => "omc",
            Regime::Oms => "oms",
        }
    }

    /// Frame in which states evolved under this regime are expressed.
    pub fn frame(self) -> Frame {
        match self {
            Regime::FullLab => Frame::Lab,
            Regime::Rotating => Frame::Rotating,
            _ => Frame::PolaronRotating,
        }
    }

    /// Required drive detunings and optical detuning, if the regime fixes
    /// them: `(Delta_1, Delta_2, delta)`.
    pub fn required_detunings(self, params: &ModelParams) -> Option<[f64; 3]> {
        let [nu1, nu2] = params.nu;
        match self {
            Regime::Nbs => Some([0.0, 0.0, 0.0]),
            Regime::Omc => Some([nu1, nu2, -nu1 + nu2]),
            Regime::Oms => Some([nu1, nu2, -nu1 - nu2]),
            _ => None,
        }
    }

    /// Checks the detuning conditions of the sideband regimes to within
    /// `tol * nu_1`.
    pub fn check_conditions(self, params: &ModelParams, tol: f64) -> Result<()> {
        let Some(required) = self.required_detunings(params) else {
            return Ok(());
        };
        let actual = [
            params.detuning(crate::fock::Nanobeam::One),
            params.detuning(crate::fock::Nanobeam::Two),
            params.optical_detuning(),
        ];
        let names = ["Delta_1", "Delta_2", "delta"];
        let formulas = match self {
            Regime::Nbs => ["0", "0", "0"],
            Regime::Omc => ["nu_1", "nu_2", "-nu_1 + nu_2"],
            _ => ["nu_1", "nu_2", "-nu_1 - nu_2"],
        };
        for k in 0..3 {
            if (actual[k] - required[k]).abs() > tol * params.nu[0] {
                return Err(Error::RegimeViolation {
                    regime: self.label().to_string(),
                    condition: format!(
                        "{} = {} required ({:.6e} rad/s), got {:.6e} rad/s",
                        names[k], formulas[k], required[k], actual[k]
                    ),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown regime '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegimeSpec {
    pub regime: Regime,
    /// Highest retained `p + q` and `r + s + u + v`; only used by
    /// [`Regime::PolaronSeries`].
    pub series_order: usize,
    pub f_mode: FMode,
}

impl RegimeSpec {
    pub fn new(regime: Regime) -> Self {
        Self {
            regime,
            series_order: DEFAULT_SERIES_ORDER,
            f_mode: FMode::Exact,
        }
    }

    /// Hamiltonian of this regime.
    pub fn build(&self, params: &ModelParams, space: HilbertSpace) -> Hamiltonian {
        match self.regime {
            Regime::FullLab => lab_frame(params, space),
            Regime::Rotating => rotating_frame(params, space),
            Regime::PolaronSeries => polaron_series(params, space, self.series_order),
            Regime::Nbs => Hamiltonian::new(beam_splitter(params, space, self.f_mode)),
            Regime::Omc => Hamiltonian::new(mechanical_coupler(params, space, self.f_mode)),
            Regime::Oms => Hamiltonian::new(mechanical_squeezer(params, space, self.f_mode)),
        }
    }
}

#[cfg(test)]
mod tests;
