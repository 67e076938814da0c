use nalgebra::DMatrix;
use nalgebra_sparse::CsrMatrix;

use super::integrator::{integrate, OdeSystem};
use super::{check_observables, Observable, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::fock::{
    csr_apply_add, expectation_density, min_eigenvalue, OperatorMatrix, QuantumState,
};
use crate::model::{CollapseOp, Hamiltonian, HamiltonianEvaluator};
use crate::C64;

/// Eigenvalues of the sampled density matrix below this are reported.
pub const NEGATIVITY_TOLERANCE: f64 = -1e-6;

/// Number of sampled times at which positivity is checked.
const POSITIVITY_CHECKS: usize = 16;

struct Lindblad<'a> {
    evaluator: HamiltonianEvaluator<'a>,
    /// `sum_k kappa_k L_k^dagger L_k`
    decay: CsrMatrix<C64>,
    jumps: Vec<(f64, CsrMatrix<C64>)>,
    dim: usize,
    scratch: Vec<C64>,
    scratch_adj: Vec<C64>,
}

impl Lindblad<'_> {
    fn column(m: &[C64], dim: usize, j: usize) -> &[C64] {
        &m[j * dim..(j + 1) * dim]
    }
}

impl OdeSystem for Lindblad<'_> {
    /// `d rho = X + X^dagger + sum_k kappa_k L_k rho L_k^dagger` with
    /// `X = -i H_eff rho` and `H_eff = H - (i/2) sum_k kappa_k L_k^dagger L_k`,
    /// using the hermiticity of `rho`. Storage is column-major.
    fn rhs(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        let n = self.dim;
        dy.fill(C64::new(0.0, 0.0));
        let h = self.evaluator.at(t);
        for j in 0..n {
            let col = Self::column(y, n, j);
            let out = &mut dy[j * n..(j + 1) * n];
            csr_apply_add(h, C64::new(0.0, -1.0), col, out);
            csr_apply_add(&self.decay, C64::new(-0.5, 0.0), col, out);
        }
        for j in 0..n {
            for i in 0..=j {
                let a = dy[i + j * n];
                let b = dy[j + i * n];
                dy[i + j * n] = a + b.conj();
                if i != j {
                    dy[j + i * n] = b + a.conj();
                }
            }
        }
        for (rate, l) in &self.jumps {
            // scratch = L rho, scratch_adj = (L rho)^dagger = rho L^dagger
            self.scratch.fill(C64::new(0.0, 0.0));
            for j in 0..n {
                csr_apply_add(
                    l,
                    C64::new(1.0, 0.0),
                    Self::column(y, n, j),
                    &mut self.scratch[j * n..(j + 1) * n],
                );
            }
            for j in 0..n {
                for i in 0..n {
                    self.scratch_adj[i + j * n] = self.scratch[j + i * n].conj();
                }
            }
            for j in 0..n {
                csr_apply_add(
                    l,
                    C64::new(*rate, 0.0),
                    &self.scratch_adj[j * n..(j + 1) * n],
                    &mut dy[j * n..(j + 1) * n],
                );
            }
        }
    }

    fn post_step(&mut self, y: &mut [C64]) {
        let n = self.dim;
        for j in 0..n {
            y[j + j * n].im = 0.0;
            for i in 0..j {
                let avg = 0.5 * (y[i + j * n] + y[j + i * n].conj());
                y[i + j * n] = avg;
                y[j + i * n] = avg.conj();
            }
        }
    }
}

/// Integrates the Lindblad master equation
/// `d rho/dt = -i[H, rho] + sum_k kappa_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2)`.
///
/// Pure initial states are promoted to density matrices. The state is
/// re-symmetrized after every accepted step, and the smallest eigenvalue is
/// spot-checked at a few sampled times; values below
/// [`NEGATIVITY_TOLERANCE`] are recorded as trajectory warnings.
pub fn propagate_lindblad(
    hamiltonian: &Hamiltonian,
    collapse: &[CollapseOp],
    rho0: &QuantumState,
    grid: &TimeGrid,
    observables: &[Observable],
) -> Result<Trajectory> {
    grid.validate()?;
    let space = *rho0.space();
    if hamiltonian.space() != &space {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: hamiltonian.space().dim(),
        });
    }
    check_observables(&space, observables)?;
    let mut decay = OperatorMatrix::zero(space);
    let mut jumps = Vec::new();
    for c in collapse {
        if !(c.rate.is_finite() && c.rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "collapse rate for {} must be finite and >= 0, got {}",
                c.mode, c.rate
            )));
        }
        if c.op.space() != &space {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: c.op.dim(),
            });
        }
        if c.rate > 0.0 {
            decay = &decay + &(&c.op.adjoint().matmul(&c.op) * c.rate);
            jumps.push((c.rate, c.op.csr().clone()));
        }
    }

    let rho = rho0.to_density();
    let rho = rho.as_density().expect("promoted to density");
    let n = space.dim();
    let times = grid.times();
    let check_every = (times.len() / POSITIVITY_CHECKS).max(1);
    let mut traj = Trajectory::new(times.clone(), observables, rho0.frame());
    let mut sys = Lindblad {
        evaluator: hamiltonian.evaluator(),
        decay: decay.csr().clone(),
        jumps,
        dim: n,
        scratch: vec![C64::new(0.0, 0.0); n * n],
        scratch_adj: vec![C64::new(0.0, 0.0); n * n],
    };
    let n_obs = observables.len();
    let last = times.len() - 1;
    let mut warnings = Vec::new();
    let stats = integrate(
        &mut sys,
        rho.as_slice().to_vec(),
        &times,
        grid.tolerances(),
        |k, y| {
            let m = DMatrix::from_column_slice(n, n, y);
            for (q, o) in observables.iter().enumerate() {
                traj.series[q].push(expectation_density(&o.op, &m).re);
            }
            traj.series[n_obs].push(m.trace().re);
            if k % check_every == 0 || k == last {
                let min = min_eigenvalue(&m);
                if min < NEGATIVITY_TOLERANCE {
                    warnings.push(format!(
                        "density matrix eigenvalue {min:.3e} at t = {:.6e}",
                        times[k]
                    ));
                }
            }
            Ok(())
        },
    )?;
    traj.stats = stats;
    traj.warnings = warnings;
    Ok(traj)
}
