use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::Nanobeam;

/// Ratio `g/nu` above which the polaron series converges slowly.
pub const SERIES_WARNING_RATIO: f64 = 0.3;

/// Physical constants of the driven two-nanobeam model. All entries are
/// angular frequencies (rad/s) or rates; index 0 is nanobeam 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Optical resonance frequencies.
    pub omega: [f64; 2],
    /// Mechanical resonance frequencies.
    pub nu: [f64; 2],
    /// Single-photon optomechanical couplings.
    pub g: [f64; 2],
    /// Drive strengths.
    pub drive: [f64; 2],
    /// Drive frequencies.
    pub drive_freq: [f64; 2],
    /// Evanescent optical coupling.
    pub gamma: f64,
    pub kappa_opt: [f64; 2],
    pub kappa_mec: [f64; 2],
}

impl ModelParams {
    /// Everything zero except unit mechanical frequencies.
    pub fn zeroed() -> Self {
        Self {
            omega: [0.0; 2],
            nu: [1.0; 2],
            g: [0.0; 2],
            drive: [0.0; 2],
            drive_freq: [0.0; 2],
            gamma: 0.0,
            kappa_opt: [0.0; 2],
            kappa_mec: [0.0; 2],
        }
    }

    /// Silicon photonic-crystal nanobeam pair: optical modes at (2π)·204 THz,
    /// mechanics at (2π)·2.23 GHz, g = (2π)·1 MHz, maximal pump (2π)·100 GHz,
    /// drives on resonance, losses κ_opt = 0.09 ν and κ_mec = 1.5e-5 ν.
    ///
    /// The optical coupling γ = (2π)·1 THz is the on-top value of the default
    /// gap fit at small separation and is not a measured number.
    pub fn paper_device() -> Self {
        let two_pi = 2.0 * PI;
        let omega = two_pi * 204e12;
        let nu = two_pi * 2.23e9;
        Self {
            omega: [omega; 2],
            nu: [nu; 2],
            g: [two_pi * 1e6; 2],
            drive: [two_pi * 1e11; 2],
            drive_freq: [omega; 2],
            gamma: two_pi * 1e12,
            kappa_opt: [0.09 * nu; 2],
            kappa_mec: [1.5e-5 * nu; 2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: &[f64]| -> Result<()> {
            for (k, x) in v.iter().enumerate() {
                if !x.is_finite() || *x < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "{name}[{}] must be finite and >= 0, got {x}",
                        k + 1
                    )));
                }
            }
            Ok(())
        };
        for (k, nu) in self.nu.iter().enumerate() {
            if !nu.is_finite() || *nu <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "nu[{}] must be > 0, got {nu}",
                    k + 1
                )));
            }
        }
        nonneg("omega", &self.omega)?;
        nonneg("g", &self.g)?;
        nonneg("drive", &self.drive)?;
        nonneg("drive_freq", &self.drive_freq)?;
        nonneg("gamma", &[self.gamma])?;
        nonneg("kappa_opt", &self.kappa_opt)?;
        nonneg("kappa_mec", &self.kappa_mec)?;
        for beam in Nanobeam::BOTH {
            let ratio = self.coupling_ratio(beam);
            if ratio >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "g/nu = {ratio} for nanobeam {} must be < 1",
                    beam.index() + 1
                )));
            }
            if ratio > SERIES_WARNING_RATIO {
                log::warn!(
                    "g/nu = {ratio:.3} for nanobeam {} exceeds {SERIES_WARNING_RATIO}; \
                     polaron series converges slowly",
                    beam.index() + 1
                );
            }
        }
        Ok(())
    }

    /// `g_j / nu_j`.
    pub fn coupling_ratio(&self, beam: Nanobeam) -> f64 {
        let j = beam.index();
        self.g[j] / self.nu[j]
    }

    /// Polaron displacement `alpha_j = -g_j / nu_j`.
    pub fn alpha(&self, beam: Nanobeam) -> f64 {
        -self.coupling_ratio(beam)
    }

    /// Kerr coefficient `g_j^2 / nu_j`.
    pub fn kerr(&self, beam: Nanobeam) -> f64 {
        let j = beam.index();
        self.g[j] * self.g[j] / self.nu[j]
    }

    /// Drive detuning `Delta_j = omega_j - omega_dj`.
    pub fn detuning(&self, beam: Nanobeam) -> f64 {
        let j = beam.index();
        self.omega[j] - self.drive_freq[j]
    }

    /// Optical detuning `delta = omega_1 - omega_2`.
    pub fn optical_detuning(&self) -> f64 {
        self.omega[0] - self.omega[1]
    }

    /// Effective optomechanical exchange rate `Omega_j g_j / (2 nu_j)`.
    pub fn effective_drive(&self, beam: Nanobeam) -> f64 {
        let j = beam.index();
        self.drive[j] * self.g[j] / (2.0 * self.nu[j])
    }

    /// Optically mediated mechanical coupling `gamma g_1 g_2 / (nu_1 nu_2)`.
    pub fn effective_mechanical_coupling(&self) -> f64 {
        self.gamma * self.g[0] * self.g[1] / (self.nu[0] * self.nu[1])
    }

    /// Every rate multiplied by `factor` (used to express rates in units of
    /// `nu_1` before integration).
    pub fn scaled(&self, factor: f64) -> Self {
        let s2 = |v: [f64; 2]| [v[0] * factor, v[1] * factor];
        Self {
            omega: s2(self.omega),
            nu: s2(self.nu),
            g: s2(self.g),
            drive: s2(self.drive),
            drive_freq: s2(self.drive_freq),
            gamma: self.gamma * factor,
            kappa_opt: s2(self.kappa_opt),
            kappa_mec: s2(self.kappa_mec),
        }
    }

    /// Rates in units of `nu_1`.
    pub fn in_mechanical_units(&self) -> Self {
        self.scaled(1.0 / self.nu[0])
    }

    /// Parameters with nanobeam labels 1 and 2 exchanged.
    pub fn swapped(&self) -> Self {
        let sw = |v: [f64; 2]| [v[1], v[0]];
        Self {
            omega: sw(self.omega),
            nu: sw(self.nu),
            g: sw(self.g),
            drive: sw(self.drive),
            drive_freq: sw(self.drive_freq),
            gamma: self.gamma,
            kappa_opt: sw(self.kappa_opt),
            kappa_mec: sw(self.kappa_mec),
        }
    }

    pub fn with_losses(mut self, enabled: bool) -> Self {
        if !enabled {
            self.kappa_opt = [0.0; 2];
            self.kappa_mec = [0.0; 2];
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_device_ratios() {
        let p = ModelParams::paper_device();
        p.validate().unwrap();
        let r = p.coupling_ratio(Nanobeam::One);
        assert!((r - 1e6 / 2.23e9).abs() < 1e-15);
        assert_eq!(p.detuning(Nanobeam::Two), 0.0);
        assert!((p.kappa_opt[0] / p.nu[0] - 0.09).abs() < 1e-15);
        let scaled = p.in_mechanical_units();
        assert!((scaled.nu[0] - 1.0).abs() < 1e-15);
        assert!((scaled.g[1] - r).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        let mut p = ModelParams::zeroed();
        p.nu[1] = 0.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::zeroed();
        p.gamma = -1.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::zeroed();
        p.g[0] = 2.0;
        assert!(p.validate().is_err());
    }
}
