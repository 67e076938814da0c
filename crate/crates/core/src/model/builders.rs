use serde::{Deserialize, Serialize};

use super::hamiltonian::Hamiltonian;
use super::params::ModelParams;
use crate::fock::{HilbertSpace, Mode, Nanobeam, OperatorMatrix};
use crate::special::confluent_1f1_neg_int;

/// How the number-dependent factor `F[j,p,q]` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FMode {
    /// `(-g/nu)^q exp(-x/2) 1F1(-n; p; x)` with `x = (g/nu)^2`.
    Exact,
    /// `(-g/nu)^q [1 - (1/2 + n/p) x]`.
    LeadingOrder,
}

/// Ladder and number operators of all four modes on one space.
pub(crate) struct Ladder {
    pub space: HilbertSpace,
    a: [OperatorMatrix; 2],
    b: [OperatorMatrix; 2],
}

impl Ladder {
    pub fn new(space: HilbertSpace) -> Self {
        Self {
            space,
            a: [
                OperatorMatrix::annihilation(space, Mode::Opt1),
                OperatorMatrix::annihilation(space, Mode::Opt2),
            ],
            b: [
                OperatorMatrix::annihilation(space, Mode::Mec1),
                OperatorMatrix::annihilation(space, Mode::Mec2),
            ],
        }
    }

    pub fn a(&self, beam: Nanobeam) -> &OperatorMatrix {
        &self.a[beam.index()]
    }

    pub fn b(&self, beam: Nanobeam) -> &OperatorMatrix {
        &self.b[beam.index()]
    }

    pub fn n_opt(&self, beam: Nanobeam) -> OperatorMatrix {
        OperatorMatrix::number(self.space, beam.optical())
    }

    pub fn n_mec(&self, beam: Nanobeam) -> OperatorMatrix {
        OperatorMatrix::number(self.space, beam.mechanical())
    }

    /// `-sum_j (g_j^2/nu_j) (a_j^dagger a_j)^2`
    pub fn kerr(&self, params: &ModelParams) -> OperatorMatrix {
        let mut h = OperatorMatrix::zero(self.space);
        for beam in Nanobeam::BOTH {
            let k = params.kerr(beam);
            if k != 0.0 {
                let term = OperatorMatrix::function_of_number(self.space, beam.optical(), |n| {
                    -k * (n * n) as f64
                });
                h = &h + &term;
            }
        }
        h
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Lab-frame Hamiltonian with `Omega_j cos(omega_dj t)(a_j^dagger + a_j)` drives.
pub fn lab_frame(params: &ModelParams, space: HilbertSpace) -> Hamiltonian {
    let l = Ladder::new(space);
    let mut h = Hamiltonian::zero(space);
    for beam in Nanobeam::BOTH {
        let j = beam.index();
        let (a, b) = (l.a(beam), l.b(beam));
        let n_a = l.n_opt(beam);
        h.add_static(&(&n_a * params.omega[j]));
        h.add_static(&(&l.n_mec(beam) * params.nu[j]));
        h.add_static(&(&n_a.matmul(&(&b.adjoint() + b)) * -params.g[j]));
        if params.drive[j] != 0.0 {
            let x = &(&a.adjoint() + a) * (params.drive[j] / 2.0);
            h.add_oscillating(params.drive_freq[j], &x);
            h.add_oscillating(-params.drive_freq[j], &x);
        }
    }
    if params.gamma != 0.0 {
        let hop = l.a(Nanobeam::One).adjoint().matmul(l.a(Nanobeam::Two));
        h.add_static(&(&(&hop + &hop.adjoint()) * params.gamma));
    }
    h
}

/// Frame of the free optical fields after dropping terms at optical
/// frequencies: drives rotate at `Delta_j`, the optical hop at `delta`.
pub fn rotating_frame(params: &ModelParams, space: HilbertSpace) -> Hamiltonian {
    let l = Ladder::new(space);
    let mut h = Hamiltonian::zero(space);
    for beam in Nanobeam::BOTH {
        let j = beam.index();
        let b = l.b(beam);
        h.add_static(&(&l.n_mec(beam) * params.nu[j]));
        h.add_static(&(&l.n_opt(beam).matmul(&(&b.adjoint() + b)) * -params.g[j]));
        if params.drive[j] != 0.0 {
            let drive = &l.a(beam).adjoint() * (params.drive[j] / 2.0);
            h.add_conjugate_pair(params.detuning(beam), &drive);
        }
    }
    if params.gamma != 0.0 {
        let hop = &l.a(Nanobeam::One).adjoint().matmul(l.a(Nanobeam::Two)) * params.gamma;
        h.add_conjugate_pair(params.optical_detuning(), &hop);
    }
    h
}

/// Rotating frame followed by the number-conditioned mechanical displacement
/// `exp(-sum_j alpha_j n_j (b_j^dagger - b_j))` and the free mechanical
/// rotation. Displacement factors are expanded in normal-ordered powers and
/// kept up to `p + q <= order` (drives) and `r + s + u + v <= order` (hop).
pub fn polaron_series(params: &ModelParams, space: HilbertSpace, order: usize) -> Hamiltonian {
    let l = Ladder::new(space);
    let mut h = Hamiltonian::new(l.kerr(params));
    let scale = params.nu[0]
        .max(params.nu[1])
        .max(params.optical_detuning().abs())
        .max(params.detuning(Nanobeam::One).abs())
        .max(params.detuning(Nanobeam::Two).abs());

    let powers = |op: &OperatorMatrix| -> Vec<OperatorMatrix> {
        let mut out = vec![OperatorMatrix::identity(space)];
        for k in 1..=order {
            let next = out[k - 1].matmul(op);
            out.push(next);
        }
        out
    };
    let b_dag: Vec<Vec<OperatorMatrix>> = Nanobeam::BOTH
        .iter()
        .map(|&j| powers(&l.b(j).adjoint()))
        .collect();
    let b_low: Vec<Vec<OperatorMatrix>> = Nanobeam::BOTH.iter().map(|&j| powers(l.b(j))).collect();

    for beam in Nanobeam::BOTH {
        let j = beam.index();
        if params.drive[j] == 0.0 {
            continue;
        }
        let alpha = params.alpha(beam);
        let prefactor = params.drive[j] / 2.0 * (-alpha * alpha / 2.0).exp();
        let a_dag = l.a(beam).adjoint();
        for p in 0..=order {
            for q in 0..=(order - p) {
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                let c =
                    prefactor * sign * alpha.powi((p + q) as i32) / (factorial(p) * factorial(q));
                if c == 0.0 {
                    continue;
                }
                let op = a_dag.matmul(&b_dag[j][p]).matmul(&b_low[j][q]);
                if op.nnz() == 0 {
                    continue;
                }
                let freq = snap(
                    params.detuning(beam) + (p as f64 - q as f64) * params.nu[j],
                    scale,
                );
                h.add_conjugate_pair(freq, &(&op * c));
            }
        }
    }

    if params.gamma != 0.0 {
        let (a1, a2) = (l.a(Nanobeam::One), l.a(Nanobeam::Two));
        let hop = a1.adjoint().matmul(a2);
        let (al1, al2) = (params.alpha(Nanobeam::One), params.alpha(Nanobeam::Two));
        let prefactor = params.gamma * (-(al1 * al1 + al2 * al2) / 2.0).exp();
        for r in 0..=order {
            for s in 0..=(order - r) {
                let mech1 = b_dag[0][r].matmul(&b_low[0][s]);
                if mech1.nnz() == 0 {
                    continue;
                }
                let hop1 = hop.matmul(&mech1);
                for u in 0..=(order - r - s) {
                    for v in 0..=(order - r - s - u) {
                        let sign = if (s + u) % 2 == 0 { 1.0 } else { -1.0 };
                        let c =
                            prefactor * sign * al1.powi((r + s) as i32) * al2.powi((u + v) as i32)
                                / (factorial(r) * factorial(s) * factorial(u) * factorial(v));
                        if c == 0.0 {
                            continue;
                        }
                        let op = hop1.matmul(&b_dag[1][u]).matmul(&b_low[1][v]);
                        if op.nnz() == 0 {
                            continue;
                        }
                        let freq = snap(
                            params.optical_detuning()
                                + (r as f64 - s as f64) * params.nu[0]
                                + (u as f64 - v as f64) * params.nu[1],
                            scale,
                        );
                        h.add_conjugate_pair(freq, &(&op * c));
                    }
                }
            }
        }
    }
    h
}

/// Sideband combinations that cancel up to rounding are treated as resonant.
fn snap(freq: f64, scale: f64) -> f64 {
    if freq.abs() <= 1e-12 * scale {
        0.0
    } else {
        freq
    }
}

/// Number-dependent coupling factor `F[j,p,q]`, diagonal in the mechanical
/// number basis of nanobeam `beam`.
pub fn aux_f(
    params: &ModelParams,
    space: HilbertSpace,
    beam: Nanobeam,
    p: u32,
    q: u32,
    mode: FMode,
) -> OperatorMatrix {
    assert!(p >= 1, "F[j,p,q] requires p >= 1");
    let ratio = params.coupling_ratio(beam);
    let x = ratio * ratio;
    let prefactor = (-ratio).powi(q as i32);
    OperatorMatrix::function_of_number(space, beam.mechanical(), |n| match mode {
        FMode::Exact => prefactor * (-x / 2.0).exp() * confluent_1f1_neg_int(n as u64, p, x),
        FMode::LeadingOrder => prefactor * (1.0 - (0.5 + n as f64 / p as f64) * x),
    })
}

/// Leading-order form of [`aux_f`].
pub fn aux_f_leading(
    params: &ModelParams,
    space: HilbertSpace,
    beam: Nanobeam,
    p: u32,
    q: u32,
) -> OperatorMatrix {
    aux_f(params, space, beam, p, q, FMode::LeadingOrder)
}

/// Resonantly driven optical beam splitter (`Delta_j = 0`, `delta = 0`):
/// Kerr terms, drives dressed by `F[j,1,0]` and the optical hop dressed by
/// `F[1,1,0] F[2,1,0]`.
pub fn beam_splitter(params: &ModelParams, space: HilbertSpace, mode: FMode) -> OperatorMatrix {
    let l = Ladder::new(space);
    let mut h = l.kerr(params);
    let f: Vec<OperatorMatrix> = Nanobeam::BOTH
        .iter()
        .map(|&j| aux_f(params, space, j, 1, 0, mode))
        .collect();
    for beam in Nanobeam::BOTH {
        let j = beam.index();
        if params.drive[j] != 0.0 {
            let a = l.a(beam);
            let x = f[j].matmul(&(&a.adjoint() + a));
            h = &h + &(&x * (params.drive[j] / 2.0));
        }
    }
    if params.gamma != 0.0 {
        let hop = l.a(Nanobeam::One).adjoint().matmul(l.a(Nanobeam::Two));
        let dressed = f[0].matmul(&f[1]).matmul(&(&hop + &hop.adjoint()));
        h = &h + &(&dressed * params.gamma);
    }
    h.into_hermitian()
}

/// Red-sideband drives with `delta = -nu_1 + nu_2`: optomechanical exchange in
/// each nanobeam and a hop that moves one photon and one phonon together.
pub fn mechanical_coupler(
    params: &ModelParams,
    space: HilbertSpace,
    mode: FMode,
) -> OperatorMatrix {
    sideband_model(params, space, mode, SidebandHop::Exchange)
}

/// Red-sideband drives with `delta = -nu_1 - nu_2`: optomechanical exchange in
/// each nanobeam and a hop that creates or destroys a phonon pair.
pub fn mechanical_squeezer(
    params: &ModelParams,
    space: HilbertSpace,
    mode: FMode,
) -> OperatorMatrix {
    sideband_model(params, space, mode, SidebandHop::PairCreation)
}

#[derive(Clone, Copy)]
enum SidebandHop {
    /// `a1^dagger a2 b1^dagger F1 F2 b2`
    Exchange,
    /// `a1^dagger a2 b1^dagger b2^dagger F1 F2`
    PairCreation,
}

fn sideband_model(
    params: &ModelParams,
    space: HilbertSpace,
    mode: FMode,
    hop_kind: SidebandHop,
) -> OperatorMatrix {
    let l = Ladder::new(space);
    let mut h = l.kerr(params);
    let f: Vec<OperatorMatrix> = Nanobeam::BOTH
        .iter()
        .map(|&j| aux_f(params, space, j, 2, 1, mode))
        .collect();
    for beam in Nanobeam::BOTH {
        let j = beam.index();
        if params.drive[j] != 0.0 {
            let exchange = l.a(beam).adjoint().matmul(&f[j]).matmul(l.b(beam));
            let term = &exchange + &exchange.adjoint();
            h = &h - &(&term * (params.drive[j] / 2.0));
        }
    }
    if params.gamma != 0.0 {
        let (b1, b2) = (l.b(Nanobeam::One), l.b(Nanobeam::Two));
        let hop = l.a(Nanobeam::One).adjoint().matmul(l.a(Nanobeam::Two));
        let ff = f[0].matmul(&f[1]);
        let forward = match hop_kind {
            SidebandHop::Exchange => hop.matmul(&b1.adjoint()).matmul(&ff).matmul(b2),
            SidebandHop::PairCreation => {
                hop.matmul(&b1.adjoint()).matmul(&b2.adjoint()).matmul(&ff)
            }
        };
        let term = &forward + &forward.adjoint();
        h = &h - &(&term * params.gamma);
    }
    h.into_hermitian()
}

/// Jump operator with its rate.
#[derive(Clone, Debug)]
pub struct CollapseOp {
    pub mode: Mode,
    pub op: OperatorMatrix,
    pub rate: f64,
}

/// Photon loss `a_j` at `kappa_opt[j]` and phonon loss `b_j` at
/// `kappa_mec[j]`; zero rates are omitted.
pub fn collapse_ops(params: &ModelParams, space: HilbertSpace) -> Vec<CollapseOp> {
    let mut out = Vec::new();
    for beam in Nanobeam::BOTH {
        let j = beam.index();
        for (mode, rate) in [
            (beam.optical(), params.kappa_opt[j]),
            (beam.mechanical(), params.kappa_mec[j]),
        ] {
            if rate > 0.0 {
                out.push(CollapseOp {
                    mode,
                    op: OperatorMatrix::annihilation(space, mode),
                    rate,
                });
            }
        }
    }
    out.sort_by_key(|c| c.mode);
    out
}
