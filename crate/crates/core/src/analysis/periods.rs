use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::Nanobeam;
use crate::model::ModelParams;
use crate::special::confluent_1f1_neg_int;

/// Couplings smaller than this fraction of their bare prefactor count as a
/// zero of the confluent factor.
const DEGENERATE_RATIO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeriodKind {
    /// Photon exchange between the two cavities.
    OpticalExchange,
    /// Photon-phonon exchange within one nanobeam.
    OptomechExchange(Nanobeam),
    /// Phonon exchange between the two nanobeams.
    MechanicalExchange,
}

impl PeriodKind {
    pub fn label(&self) -> String {
        match self {
            PeriodKind::OpticalExchange => "optical-exchange".to_string(),
            PeriodKind::OptomechExchange(j) => format!("optomech-exchange-{}", j.index() + 1),
            PeriodKind::MechanicalExchange => "mechanical-exchange".to_string(),
        }
    }
}

/// Closed-form period `2 pi / c` for an exchange coupling `c`, in units of
/// `1/nu_1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodPrediction {
    pub kind: PeriodKind,
    pub value: f64,
    /// Mechanical occupations the coupling was evaluated at.
    pub occupations: [u64; 2],
    pub params: ModelParams,
}

impl PeriodPrediction {
    /// Period of the excitation-number oscillation.
    ///
    /// A two-mode exchange `c (x^dagger y + h.c.)` rotates amplitudes with
    /// period `2 pi / c` and populations (`cos^2(c t)`) with half of it. The
    /// mechanical exchange acts through a photon-phonon pair whose two hopping
    /// paths interfere, which halves the effective coupling, so its population
    /// period equals `value`.
    pub fn population_period(&self) -> f64 {
        match self.kind {
            PeriodKind::MechanicalExchange => self.value,
            _ => self.value / 2.0,
        }
    }
}

fn scaled(params: &ModelParams) -> ModelParams {
    params.in_mechanical_units()
}

fn x(params: &ModelParams, beam: Nanobeam) -> f64 {
    params.coupling_ratio(beam).powi(2)
}

fn finish(
    kind: PeriodKind,
    coupling: f64,
    bare: f64,
    occupations: [u64; 2],
    params: &ModelParams,
) -> Result<PeriodPrediction> {
    if coupling.abs() <= DEGENERATE_RATIO * bare.abs() {
        return Err(Error::DegenerateCoupling(format!(
            "{} coupling vanishes at mechanical occupations {:?}",
            kind.label(),
            occupations
        )));
    }
    let value = 2.0 * PI / coupling.abs();
    if !value.is_finite() {
        return Err(Error::UndefinedPeriod(format!(
            "{} period overflows",
            kind.label()
        )));
    }
    Ok(PeriodPrediction {
        kind,
        value,
        occupations,
        params: *params,
    })
}

/// `2 pi / [gamma e^{-x1/2} e^{-x2/2} 1F1(-n1;1;x1) 1F1(-n2;1;x2)]`.
pub fn period_optical_bs(params: &ModelParams, n1: u64, n2: u64) -> Result<PeriodPrediction> {
    let p = scaled(params);
    if p.gamma <= 0.0 {
        return Err(Error::UndefinedPeriod(
            "optical exchange needs gamma > 0".to_string(),
        ));
    }
    let (x1, x2) = (x(&p, Nanobeam::One), x(&p, Nanobeam::Two));
    let c = p.gamma
        * (-(x1 + x2) / 2.0).exp()
        * confluent_1f1_neg_int(n1, 1, x1)
        * confluent_1f1_neg_int(n2, 1, x2);
    finish(PeriodKind::OpticalExchange, c, p.gamma, [n1, n2], params)
}

/// `2 pi / [(Omega_j/2)(g_j/nu_j) e^{-x/2} 1F1(-n;2;x)]`.
pub fn period_om(params: &ModelParams, beam: Nanobeam, n: u64) -> Result<PeriodPrediction> {
    let p = scaled(params);
    let j = beam.index();
    let bare = p.effective_drive(beam);
    if bare <= 0.0 {
        return Err(Error::UndefinedPeriod(format!(
            "optomechanical exchange in nanobeam {} needs Omega > 0 and g > 0",
            j + 1
        )));
    }
    let xj = x(&p, beam);
    let c = bare * (-xj / 2.0).exp() * confluent_1f1_neg_int(n, 2, xj);
    let mut occ = [0; 2];
    occ[j] = n;
    finish(PeriodKind::OptomechExchange(beam), c, bare, occ, params)
}

/// `2 pi / [gamma (g1 g2/(nu1 nu2)) e^{-x1/2} e^{-x2/2} 1F1(-n1;2;x1) 1F1(-n2;2;x2)]`.
pub fn period_mec(params: &ModelParams, n1: u64, n2: u64) -> Result<PeriodPrediction> {
    let p = scaled(params);
    let bare = p.effective_mechanical_coupling();
    if bare <= 0.0 {
        return Err(Error::UndefinedPeriod(
            "mechanical exchange needs gamma > 0 and g1, g2 > 0".to_string(),
        ));
    }
    let (x1, x2) = (x(&p, Nanobeam::One), x(&p, Nanobeam::Two));
    let c = bare
        * (-(x1 + x2) / 2.0).exp()
        * confluent_1f1_neg_int(n1, 2, x1)
        * confluent_1f1_neg_int(n2, 2, x2);
    finish(PeriodKind::MechanicalExchange, c, bare, [n1, n2], params)
}

/// Effective couplings of the sideband regimes in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingHierarchy {
    /// `Omega_j g_j / (2 nu_j)`
    pub omega_eff: [f64; 2],
    /// `gamma g_1 g_2 / (nu_1 nu_2)`
    pub gamma_eff: f64,
    /// `g_j^2 / nu_j`
    pub kerr: [f64; 2],
}

impl CouplingHierarchy {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            omega_eff: [
                params.effective_drive(Nanobeam::One),
                params.effective_drive(Nanobeam::Two),
            ],
            gamma_eff: params.effective_mechanical_coupling(),
            kerr: [params.kerr(Nanobeam::One), params.kerr(Nanobeam::Two)],
        }
    }

    /// `Omega_eff > Gamma_eff > g^2/nu` for both nanobeams.
    pub fn is_ordered(&self) -> bool {
        (0..2).all(|j| self.omega_eff[j] > self.gamma_eff && self.gamma_eff > self.kerr[j])
    }
}

/// Rate in rad/s expressed as an ordinary frequency in Hz.
pub fn to_hz(rate: f64) -> f64 {
    rate / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        let mut p = ModelParams::zeroed();
        p.nu = [2.0, 2.0];
        p.g = [0.02, 0.04];
        p.gamma = 1.5;
        p.drive = [3.0, 2.0];
        p
    }

    #[test]
    fn optical_period_limits() {
        let mut p = params();
        p.g = [0.0; 2];
        let t = period_optical_bs(&p, 3, 1).unwrap();
        // gamma = 0.75 nu_1
        assert!((t.value - 2.0 * PI / 0.75).abs() < 1e-12);
        assert!((t.population_period() - PI / 0.75).abs() < 1e-12);

        let mut p = params();
        p.g = [2e-3, 2e-3];
        let t = period_optical_bs(&p, 0, 0).unwrap();
        assert!((t.value / (2.0 * PI / 0.75) - 1e-6f64.exp()).abs() < 1e-15);

        let p = params();
        let x1 = (0.01f64).powi(2);
        let r =
            period_optical_bs(&p, 1, 0).unwrap().value / period_optical_bs(&p, 0, 0).unwrap().value;
        assert!((r - 1.0 / (1.0 - x1)).abs() < 1e-13);

        let mut p = params();
        p.gamma = 0.0;
        assert!(matches!(
            period_optical_bs(&p, 0, 0),
            Err(Error::UndefinedPeriod(_))
        ));
    }

    #[test]
    fn degenerate_zero_of_confluent_factor() {
        let mut p = params();
        // 1F1(-1; 1; x) = 1 - x vanishes at x = 1, i.e. g = nu.
        p.g = [2.0, 0.0];
        assert!(matches!(
            period_optical_bs(&p, 1, 0),
            Err(Error::DegenerateCoupling(_))
        ));
    }

    #[test]
    fn optomech_period() {
        let p = params();
        let t0 = period_om(&p, Nanobeam::One, 0).unwrap();
        let omega_eff = 3.0 * 0.01 / 2.0 / 2.0;
        assert!((t0.value * omega_eff / (2.0 * PI) - (0.5e-4f64).exp()).abs() < 1e-14);
        let t1 = period_om(&p, Nanobeam::One, 1).unwrap();
        assert!((t1.value / t0.value - 1.0 / (1.0 - 1e-4 / 2.0)).abs() < 1e-13);
        let mut q = p;
        q.drive[1] = 0.0;
        assert!(period_om(&q, Nanobeam::Two, 0).is_err());
    }

    #[test]
    fn mechanical_period_and_cross_ratio() {
        let p = params();
        let tm = period_mec(&p, 0, 0).unwrap();
        let t_om = period_om(&p, Nanobeam::One, 0).unwrap();
        // tau_mec / tau_om,1 = Omega_1 nu_2 / (2 gamma g_2) times the 1F1 ratio.
        let (x1, x2): (f64, f64) = (1e-4, 4e-4);
        let ratio =
            3.0 * 2.0 / (2.0 * 1.5 * 0.04) * (-(x1 / 2.0)).exp() * confluent_1f1_neg_int(0, 2, x1)
                / ((-(x1 + x2) / 2.0).exp()
                    * confluent_1f1_neg_int(0, 2, x1)
                    * confluent_1f1_neg_int(0, 2, x2));
        assert!((tm.value / t_om.value / ratio - 1.0).abs() < 1e-12);
        assert_eq!(tm.population_period(), tm.value);
    }

    #[test]
    fn periods_scale_inversely_with_couplings() {
        let p = params();
        let mut q = p;
        q.gamma *= 2.0;
        q.drive[0] *= 2.0;
        let half = |a: f64, b: f64| (a / b - 2.0).abs() < 1e-14;
        assert!(half(
            period_optical_bs(&p, 1, 2).unwrap().value,
            period_optical_bs(&q, 1, 2).unwrap().value
        ));
        assert!(half(
            period_mec(&p, 1, 0).unwrap().value,
            period_mec(&q, 1, 0).unwrap().value
        ));
        assert!(half(
            period_om(&p, Nanobeam::One, 1).unwrap().value,
            period_om(&q, Nanobeam::One, 1).unwrap().value
        ));
    }

    #[test]
    fn optical_period_symmetric_under_label_swap() {
        let p = params();
        let a = period_optical_bs(&p, 2, 1).unwrap().value;
        let b = period_optical_bs(&p.swapped(), 1, 2).unwrap().value;
        assert!((a - b).abs() < 1e-13 * a);
    }

    #[test]
    fn hierarchy() {
        let h = CouplingHierarchy::new(&ModelParams::paper_device());
        assert!(h.is_ordered());
        assert!((to_hz(h.omega_eff[0]) - 1e11 * 1e6 / 2.23e9 / 2.0).abs() < 1e-3);
    }
}
