use super::integrator::{integrate, OdeSystem};
use super::{check_observables, Observable, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::fock::{csr_apply_add, expectation_pure, QuantumState};
use crate::model::{Hamiltonian, HamiltonianEvaluator};
use crate::C64;

struct Schrodinger<'a> {
    evaluator: HamiltonianEvaluator<'a>,
}

impl OdeSystem for Schrodinger<'_> {
    fn rhs(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        dy.fill(C64::new(0.0, 0.0));
        csr_apply_add(self.evaluator.at(t), C64::new(0.0, -1.0), y, dy);
    }
}

/// Integrates `d psi/dt = -i H(t) psi` and records the observables and the
/// squared norm at every grid time. The norm is not renormalized.
pub fn propagate_schrodinger(
    hamiltonian: &Hamiltonian,
    psi0: &QuantumState,
    grid: &TimeGrid,
    observables: &[Observable],
) -> Result<Trajectory> {
    grid.validate()?;
    let space = *psi0.space();
    if hamiltonian.space() != &space {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: hamiltonian.space().dim(),
        });
    }
    check_observables(&space, observables)?;
    let psi = psi0.as_pure().ok_or_else(|| {
        Error::InvalidState("Schrödinger propagation needs a pure state".to_string())
    })?;

    let times = grid.times();
    let mut traj = Trajectory::new(times.clone(), observables, psi0.frame());
    let mut sys = Schrodinger {
        evaluator: hamiltonian.evaluator(),
    };
    let n_obs = observables.len();
    let stats = integrate(
        &mut sys,
        psi.as_slice().to_vec(),
        &times,
        grid.tolerances(),
        |_, y| {
            for (k, o) in observables.iter().enumerate() {
                traj.series[k].push(expectation_pure(&o.op, y).re);
            }
            let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
            traj.series[n_obs].push(norm);
            Ok(())
        },
    )?;
    traj.stats = stats;
    Ok(traj)
}
