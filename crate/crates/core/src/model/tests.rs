use super::*;
use crate::fock::{Mode, Nanobeam, OperatorMatrix};
use crate::C64;

fn occ_index(space: &HilbertSpace, occ: [usize; 4]) -> usize {
    space.index_of(&occ).unwrap()
}

fn assert_hermitian(op: &OperatorMatrix) {
    let scale = op.max_abs().max(1.0);
    assert!(
        op.hermiticity_error() <= 1e-12 * scale,
        "{}",
        op.hermiticity_error()
    );
}

/// Dimensionless parameters with distinct mechanical frequencies.
fn test_params() -> ModelParams {
    ModelParams {
        omega: [40.0, 40.3],
        nu: [1.0, 1.3],
        g: [0.05, 0.07],
        drive: [0.8, 0.6],
        drive_freq: [39.2, 39.9],
        gamma: 0.9,
        kappa_opt: [0.0; 2],
        kappa_mec: [0.0; 2],
    }
}

#[test]
fn lab_frame_trivial_limits() {
    let s = HilbertSpace::new([2, 1, 2, 2]).unwrap();
    let mut p = ModelParams::zeroed();
    p.nu = [0.0; 2];
    let h = lab_frame(&p, s);
    assert_eq!(h.at(0.3).max_abs(), 0.0);

    let mut p = ModelParams::zeroed();
    p.omega = [3.0, 5.0];
    p.nu = [1.0, 1.5];
    let h = lab_frame(&p, s).at(0.7);
    for (r, c, v) in h.entries() {
        assert_eq!(r, c);
        let n = s.occupations(r);
        let expected = 3.0 * n[0] as f64 + 5.0 * n[1] as f64 + n[2] as f64 + 1.5 * n[3] as f64;
        assert!((v.re - expected).abs() < 1e-14);
    }
}

#[test]
fn single_nanobeam_polaron_spectrum() {
    let s = HilbertSpace::new([1, 0, 40, 0]).unwrap();
    let mut p = ModelParams::zeroed();
    p.omega = [5.0, 0.0];
    p.g = [0.3, 0.0];
    let h = lab_frame(&p, s).at(0.0);
    assert_hermitian(&h);
    let evals = h.to_dense().symmetric_eigenvalues();
    for m in 0..5 {
        let target = 5.0 - 0.09 + m as f64;
        let best = evals
            .iter()
            .map(|e| (e - target).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-6, "level {m}: {best}");
    }
}

#[test]
fn rotating_frame_static_when_resonant() {
    let s = HilbertSpace::new([1, 1, 2, 2]).unwrap();
    let mut p = test_params();
    p.omega = [40.0, 40.0];
    p.drive_freq = [40.0, 40.0];
    let h = rotating_frame(&p, s);
    assert!(h.is_time_independent());
    assert_eq!(h.at(0.0).max_abs_diff(&h.at(1.0)), 0.0);
    assert_hermitian(&h.at(0.0));

    // Without drive or hop only the mechanical and optomechanical terms remain.
    p.drive = [0.0; 2];
    p.gamma = 0.0;
    let h = rotating_frame(&p, s).at(2.0);
    let mut expected = OperatorMatrix::zero(s);
    for beam in Nanobeam::BOTH {
        let j = beam.index();
        let b = OperatorMatrix::annihilation(s, beam.mechanical());
        let n_b = OperatorMatrix::number(s, beam.mechanical());
        let n_a = OperatorMatrix::number(s, beam.optical());
        expected = &expected + &(&n_b * p.nu[j]);
        expected = &expected - &(&n_a.matmul(&(&b.adjoint() + &b)) * p.g[j]);
    }
    assert!(h.max_abs_diff(&expected) < 1e-15);
}

#[test]
fn rotating_frame_phases() {
    let s = HilbertSpace::new([1, 1, 1, 1]).unwrap();
    let p = test_params();
    let h = rotating_frame(&p, s);
    let t = 0.37;
    let m = h.at(t);
    assert_hermitian(&m);
    let vac = occ_index(&s, [0, 0, 0, 0]);
    let one = occ_index(&s, [1, 0, 0, 0]);
    let delta1 = p.detuning(Nanobeam::One);
    let expected = C64::from_polar(p.drive[0] / 2.0, delta1 * t);
    assert!((m.get(one, vac) - expected).norm() < 1e-14);
    let hop = occ_index(&s, [0, 1, 0, 0]);
    let expected = C64::from_polar(p.gamma, p.optical_detuning() * t);
    assert!((m.get(one, hop) - expected).norm() < 1e-14);
}

#[test]
fn aux_f_limits_and_values() {
    let s = HilbertSpace::new([1, 1, 4, 3]).unwrap();
    let mut p = ModelParams::zeroed();
    let id = OperatorMatrix::identity(s);
    for mode in [FMode::Exact, FMode::LeadingOrder] {
        assert!(aux_f(&p, s, Nanobeam::One, 1, 0, mode).max_abs_diff(&id) == 0.0);
        assert_eq!(aux_f(&p, s, Nanobeam::Two, 2, 1, mode).max_abs(), 0.0);
    }
    p.g = [1e-3, 0.0];
    let f = aux_f(&p, s, Nanobeam::One, 1, 0, FMode::Exact);
    assert!((f.get(0, 0).re - (-5e-7f64).exp()).abs() < 1e-16);
    assert_hermitian(&f);

    let idx = occ_index(&s, [0, 0, 1, 0]);
    let lead = aux_f_leading(&p, s, Nanobeam::One, 1, 0);
    assert!((lead.get(idx, idx).re - 0.9999985).abs() < 1e-15);
    // Odd q carries the sign of -g/nu in both forms.
    let f21 = aux_f(&p, s, Nanobeam::One, 2, 1, FMode::Exact);
    let l21 = aux_f_leading(&p, s, Nanobeam::One, 2, 1);
    assert!(f21.get(idx, idx).re < 0.0 && l21.get(idx, idx).re < 0.0);
    assert!((f21.get(idx, idx) - l21.get(idx, idx)).norm() < 1e-14);
}

#[test]
fn beam_splitter_limits() {
    let s = HilbertSpace::new([2, 2, 1, 1]).unwrap();
    let mut p = ModelParams::zeroed();
    p.gamma = 0.7;
    let h = beam_splitter(&p, s, FMode::Exact);
    let hop = OperatorMatrix::creation(s, Mode::Opt1)
        .matmul(&OperatorMatrix::annihilation(s, Mode::Opt2));
    assert!(h.max_abs_diff(&(&(&hop + &hop.adjoint()) * 0.7)) < 1e-15);
    let a = occ_index(&s, [1, 0, 0, 0]);
    let b = occ_index(&s, [0, 1, 0, 0]);
    let block = nalgebra::Matrix2::new(h.get(a, a), h.get(a, b), h.get(b, a), h.get(b, b));
    let evals = block.symmetric_eigenvalues();
    let mut e: Vec<f64> = evals.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    assert!((e[0] + 0.7).abs() < 1e-14 && (e[1] - 0.7).abs() < 1e-14);

    let mut p = test_params();
    p.gamma = 0.0;
    p.drive = [0.0; 2];
    let h = beam_splitter(&p, s, FMode::Exact);
    let two = occ_index(&s, [2, 0, 0, 0]);
    assert!((h.get(two, two).re + 4.0 * p.kerr(Nanobeam::One)).abs() < 1e-15);
}

#[test]
fn beam_splitter_conserves_optical_number_without_drive() {
    let s = HilbertSpace::new([2, 2, 2, 2]).unwrap();
    let mut p = test_params();
    p.drive = [0.0; 2];
    let h = beam_splitter(&p, s, FMode::Exact);
    assert_hermitian(&h);
    let n_opt = &OperatorMatrix::number(s, Mode::Opt1) + &OperatorMatrix::number(s, Mode::Opt2);
    assert!(h.commutator(&n_opt).max_abs() <= 1e-12);
}

#[test]
fn sideband_models_vanish_without_coupling() {
    let s = HilbertSpace::new([1, 1, 2, 2]).unwrap();
    let mut p = test_params();
    p.g = [0.0; 2];
    assert_eq!(mechanical_coupler(&p, s, FMode::Exact).max_abs(), 0.0);
    assert_eq!(mechanical_squeezer(&p, s, FMode::Exact).max_abs(), 0.0);
}

#[test]
fn sideband_matrix_elements() {
    let s = HilbertSpace::new([1, 1, 2, 2]).unwrap();
    let p = test_params();
    let (x1, x2) = (
        p.alpha(Nanobeam::One).powi(2),
        p.alpha(Nanobeam::Two).powi(2),
    );
    let omc = mechanical_coupler(&p, s, FMode::Exact);
    let oms = mechanical_squeezer(&p, s, FMode::Exact);
    assert_hermitian(&omc);
    assert_hermitian(&oms);

    // Photon of beam 1 converted into a phonon of beam 1.
    let from = occ_index(&s, [1, 0, 0, 0]);
    let to = occ_index(&s, [0, 0, 1, 0]);
    let expected = p.effective_drive(Nanobeam::One) * (-x1 / 2.0).exp();
    assert!((omc.get(to, from).re - expected).abs() < 1e-15);
    assert!((oms.get(to, from).re - expected).abs() < 1e-15);

    let gamma_eff = p.effective_mechanical_coupling() * (-(x1 + x2) / 2.0).exp();
    // Photon and phonon hop together from beam 2 to beam 1.
    let from = occ_index(&s, [0, 1, 0, 1]);
    let to = occ_index(&s, [1, 0, 1, 0]);
    assert!((omc.get(to, from).re + gamma_eff).abs() < 1e-15);
    // Photon hops from beam 2 to beam 1 while a phonon pair is created.
    let from = occ_index(&s, [0, 1, 0, 0]);
    let to = occ_index(&s, [1, 0, 1, 1]);
    assert!((oms.get(to, from).re + gamma_eff).abs() < 1e-15);
}

#[test]
fn sideband_drive_blocks_agree() {
    let s = HilbertSpace::new([1, 1, 3, 3]).unwrap();
    let mut p = test_params();
    p.gamma = 0.0;
    let omc = mechanical_coupler(&p, s, FMode::Exact);
    let oms = mechanical_squeezer(&p, s, FMode::Exact);
    assert!(omc.max_abs_diff(&oms) <= 1e-14);
}

#[test]
fn mechanical_coupler_conserves_total_excitation() {
    let s = HilbertSpace::new([2, 2, 3, 3]).unwrap();
    let p = test_params();
    let h = mechanical_coupler(&p, s, FMode::Exact);
    let n_tot = Mode::ALL.iter().fold(OperatorMatrix::zero(s), |acc, &m| {
        &acc + &OperatorMatrix::number(s, m)
    });
    assert!(h.commutator(&n_tot).max_abs() <= 1e-10 * p.nu[0]);
}

#[test]
fn squeezer_hop_support_pattern() {
    let s = HilbertSpace::new([2, 2, 3, 3]).unwrap();
    let mut p = test_params();
    p.drive = [0.0; 2];
    let h = mechanical_squeezer(&p, s, FMode::Exact);
    let kerr_free = &h - &mechanical_squeezer(&ModelParams { gamma: 0.0, ..p }, s, FMode::Exact);
    assert!(kerr_free.nnz() > 0);
    for (r, c, _) in kerr_free.entries() {
        let (to, from) = (s.occupations(r), s.occupations(c));
        let d: Vec<i64> = (0..4).map(|k| to[k] as i64 - from[k] as i64).collect();
        assert!(d == [1, -1, 1, 1] || d == [-1, 1, -1, -1], "{d:?}");
    }
}

#[test]
fn polaron_series_order_zero() {
    let s = HilbertSpace::new([1, 1, 2, 2]).unwrap();
    let mut p = test_params();
    p.omega = [40.0, 40.0];
    p.drive_freq = [40.0, 40.0];
    let h = polaron_series(&p, s, 0);
    assert!(h.is_time_independent());
    let mut expected = super::builders::Ladder::new(s).kerr(&p);
    for beam in Nanobeam::BOTH {
        let j = beam.index();
        let a = OperatorMatrix::annihilation(s, beam.optical());
        let x = &(&a.adjoint() + &a) * (p.drive[j] / 2.0 * (-p.alpha(beam).powi(2) / 2.0).exp());
        expected = &expected + &x;
    }
    let hop = OperatorMatrix::creation(s, Mode::Opt1)
        .matmul(&OperatorMatrix::annihilation(s, Mode::Opt2));
    let damp = (-(p.alpha(Nanobeam::One).powi(2) + p.alpha(Nanobeam::Two).powi(2)) / 2.0).exp();
    expected = &expected + &(&(&hop + &hop.adjoint()) * (p.gamma * damp));
    assert!(h.at(0.0).max_abs_diff(&expected) < 1e-14);
}

#[test]
fn polaron_series_converges_in_order() {
    let s = HilbertSpace::new([1, 1, 3, 3]).unwrap();
    let mut p = test_params();
    p.g = [1e-3, 1e-3];
    p.nu = [1.0, 1.0];
    let t = 0.9;
    let h4 = polaron_series(&p, s, 4).at(t);
    let h6 = polaron_series(&p, s, 6).at(t);
    assert_hermitian(&h4);
    assert!(h4.max_abs_diff(&h6) < 1e-12);
}

/// Resonant part of the polaron series summed to all orders equals the
/// sideband-selected effective Hamiltonian with exact `F`.
fn resonant_part(p: &ModelParams, s: HilbertSpace) -> OperatorMatrix {
    let order = 2 * (s.cutoff(Mode::Mec1) + s.cutoff(Mode::Mec2)) + 2;
    polaron_series(p, s, order).static_part().clone()
}

#[test]
fn beam_splitter_is_resonant_part_of_series() {
    let s = HilbertSpace::new([1, 1, 2, 2]).unwrap();
    let mut p = test_params();
    p.g = [0.2, 0.15];
    p.omega = [40.0, 40.0];
    p.drive_freq = p.omega;
    let h = beam_splitter(&p, s, FMode::Exact);
    assert!(h.max_abs_diff(&resonant_part(&p, s)) < 1e-13);
}

#[test]
fn squeezer_is_resonant_part_of_series() {
    let s = HilbertSpace::new([1, 1, 2, 2]).unwrap();
    let mut p = test_params();
    p.g = [0.2, 0.15];
    p.omega = [40.0, 40.0 + p.nu[0] + p.nu[1]];
    p.drive_freq = [p.omega[0] - p.nu[0], p.omega[1] - p.nu[1]];
    let h = mechanical_squeezer(&p, s, FMode::Exact);
    assert!(h.max_abs_diff(&resonant_part(&p, s)) < 1e-13);
}

#[test]
fn coupler_matches_series_up_to_hop_sign() {
    let s = HilbertSpace::new([1, 1, 2, 2]).unwrap();
    let mut p = test_params();
    p.g = [0.2, 0.15];
    p.omega = [40.0, 40.0 + p.nu[0] - p.nu[1]];
    p.drive_freq = [p.omega[0] - p.nu[0], p.omega[1] - p.nu[1]];
    let series = resonant_part(&p, s);
    let drive_only = mechanical_coupler(&ModelParams { gamma: 0.0, ..p }, s, FMode::Exact);
    let hop = &mechanical_coupler(&p, s, FMode::Exact) - &drive_only;
    let flipped = &drive_only - &hop;
    assert!(flipped.max_abs_diff(&series) < 1e-13);
}

#[test]
fn collapse_operators() {
    let s = HilbertSpace::new([1, 1, 1, 1]).unwrap();
    let mut p = ModelParams::zeroed();
    assert!(collapse_ops(&p, s).is_empty());
    p.kappa_opt = [0.09, 0.0];
    let ops = collapse_ops(&p, s);
    assert_eq!(ops.len(), 1);
    assert_eq!(ops[0].mode, Mode::Opt1);
    assert!((ops[0].rate - 0.09).abs() == 0.0);
    p.kappa_opt = [0.1, 0.2];
    p.kappa_mec = [0.3, 0.4];
    let ops = collapse_ops(&p, s);
    assert_eq!(ops.len(), 4);
    for c in &ops {
        assert!(c.op.max_abs_diff(&OperatorMatrix::annihilation(s, c.mode)) == 0.0);
    }
}

#[test]
fn regime_conditions() {
    let mut p = test_params();
    p.omega = [40.0, 40.0 + p.nu[0] - p.nu[1]];
    p.drive_freq = [p.omega[0] - p.nu[0], p.omega[1] - p.nu[1]];
    assert!(Regime::Omc.check_conditions(&p, 1e-9).is_ok());
    assert!(Regime::Rotating.check_conditions(&p, 1e-9).is_ok());
    let err = Regime::Oms.check_conditions(&p, 1e-9).unwrap_err();
    assert!(err.to_string().contains("delta"), "{err}");
    let err = Regime::Nbs.check_conditions(&p, 1e-9).unwrap_err();
    assert!(err.to_string().contains("Delta_1"), "{err}");
    assert_eq!("OMS".parse::<Regime>().unwrap(), Regime::Oms);
}
