use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapConfiguration {
    /// Nanobeams stacked vertically: `A exp(-s / l)`.
    OnTop,
    /// Nanobeams side by side: `A exp(-P4(s))` with `P4(0) = 0`.
    SideBySide,
}

/// Optical coupling `gamma(s)` against the gap `s` in nm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCouplingFit {
    pub configuration: GapConfiguration,
    /// `gamma(0)` in rad/s.
    pub amplitude: f64,
    /// On-top: `[l]` in nm. Side-by-side: `[c1, c2, c3, c4]` of
    /// `P4(s) = c1 s + c2 s^2 + c3 s^3 + c4 s^4`.
    pub coefficients: Vec<f64>,
    /// Gap range covered by the fit, in nm.
    pub range_nm: [f64; 2],
}

impl GapCouplingFit {
    /// Placeholder on-top fit. Not fitted to any data: the coefficients only
    /// reproduce the qualitative decay and a THz-scale coupling at small gaps.
    pub fn placeholder_on_top() -> Self {
        Self {
            configuration: GapConfiguration::OnTop,
            amplitude: 2.0 * PI * 1.5e12,
            coefficients: vec![60.0],
            range_nm: [20.0, 300.0],
        }
    }

    /// Placeholder side-by-side fit, weaker than the on-top one at every gap.
    /// Not fitted to any data.
    pub fn placeholder_side_by_side() -> Self {
        Self {
            configuration: GapConfiguration::SideBySide,
            amplitude: 2.0 * PI * 0.8e12,
            coefficients: vec![1.0 / 50.0, 1e-5, 1e-8, 1e-11],
            range_nm: [20.0, 300.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("gap fit: {msg}")));
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return bad("amplitude must be positive");
        }
        if !(self.range_nm[0] >= 0.0 && self.range_nm[1] > self.range_nm[0]) {
            return bad("range must satisfy 0 <= start < end");
        }
        match self.configuration {
            GapConfiguration::OnTop => {
                if self.coefficients.len() != 1 || !(self.coefficients[0] > 0.0) {
                    return bad("on-top fit needs one positive decay length");
                }
            }
            GapConfiguration::SideBySide => {
                if self.coefficients.len() != 4 {
                    return bad("side-by-side fit needs four polynomial coefficients");
                }
                // Monotone decay: P4' > 0 on the fitted range.
                let [c1, c2, c3, c4] = [
                    self.coefficients[0],
                    self.coefficients[1],
                    self.coefficients[2],
                    self.coefficients[3],
                ];
                let steps = 200;
                for k in 0..=steps {
                    let s = self.range_nm[0]
                        + (self.range_nm[1] - self.range_nm[0]) * k as f64 / steps as f64;
                    let slope = c1 + 2.0 * c2 * s + 3.0 * c3 * s * s + 4.0 * c4 * s.powi(3);
                    if slope <= 0.0 {
                        return bad("coupling must decrease over the fitted range");
                    }
                }
            }
        }
        Ok(())
    }

    fn exponent(&self, s: f64) -> f64 {
        match self.configuration {
            GapConfiguration::OnTop => s / self.coefficients[0],
            GapConfiguration::SideBySide => {
                let c = &self.coefficients;
                s * (c[0] + s * (c[1] + s * (c[2] + s * c[3])))
            }
        }
    }
}

/// `gamma(s)` in rad/s; gaps outside the fitted range are evaluated with a
/// warning.
pub fn gap_coupling(fit: &GapCouplingFit, s_nm: f64) -> f64 {
    if s_nm < fit.range_nm[0] || s_nm > fit.range_nm[1] {
        log::warn!(
            "gap {s_nm} nm lies outside the fitted range [{}, {}] nm",
            fit.range_nm[0],
            fit.range_nm[1]
        );
    }
    fit.amplitude * (-fit.exponent(s_nm)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_at_zero_gap() {
        for fit in [
            GapCouplingFit::placeholder_on_top(),
            GapCouplingFit::placeholder_side_by_side(),
        ] {
            fit.validate().unwrap();
            assert_eq!(gap_coupling(&fit, 0.0), fit.amplitude);
        }
    }

    #[test]
    fn monotone_and_on_top_stronger() {
        let top = GapCouplingFit::placeholder_on_top();
        let side = GapCouplingFit::placeholder_side_by_side();
        let gaps: Vec<f64> = (0..=56).map(|k| 20.0 + 5.0 * k as f64).collect();
        for w in gaps.windows(2) {
            assert!(gap_coupling(&top, w[0]) > gap_coupling(&top, w[1]));
            assert!(gap_coupling(&side, w[0]) > gap_coupling(&side, w[1]));
        }
        for &s in &gaps {
            assert!(gap_coupling(&top, s) > gap_coupling(&side, s));
        }
    }

    #[test]
    fn on_top_is_log_linear() {
        let top = GapCouplingFit::placeholder_on_top();
        let logs: Vec<f64> = (0..30)
            .map(|k| gap_coupling(&top, 20.0 + 9.0 * k as f64).ln())
            .collect();
        for w in logs.windows(3) {
            assert!((w[0] - 2.0 * w[1] + w[2]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_rising_fit() {
        let mut fit = GapCouplingFit::placeholder_side_by_side();
        fit.coefficients = vec![-0.01, 0.0, 0.0, 0.0];
        assert!(fit.validate().is_err());
        let mut fit = GapCouplingFit::placeholder_on_top();
        fit.coefficients = vec![];
        assert!(fit.validate().is_err());
    }
}
