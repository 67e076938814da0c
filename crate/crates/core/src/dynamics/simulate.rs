use super::{
    build_initial_state, propagate_lindblad, propagate_schrodinger, InitialStateSpec, Observable,
    TimeGrid, Trajectory,
};
use crate::error::Result;
use crate::fock::{HilbertSpace, Occupations};
use crate::model::{collapse_ops, ModelParams, RegimeSpec};

/// Everything needed to propagate one scenario except the truncation.
#[derive(Clone, Debug)]
pub struct SimulationSetup {
    /// Parameters in units of `nu_1` (see [`ModelParams::in_mechanical_units`]).
    pub params: ModelParams,
    pub regime: RegimeSpec,
    pub initial: InitialStateSpec,
    pub grid: TimeGrid,
    /// Use the Lindblad equation with the parameter loss rates.
    pub losses: bool,
}

impl SimulationSetup {
    /// Builds the Hamiltonian on `cutoffs` and propagates the initial state.
    /// Occupation numbers of all modes are always recorded, followed by
    /// `extra` observables built on the same space.
    pub fn run<F>(&self, cutoffs: Occupations, series_order: usize, extra: F) -> Result<Trajectory>
    where
        F: Fn(HilbertSpace) -> Vec<Observable>,
    {
        let space = HilbertSpace::new(cutoffs)?;
        let spec = RegimeSpec {
            series_order,
            ..self.regime
        };
        let h = spec.build(&self.params, space);
        let psi = build_initial_state(space, &self.initial, spec.regime.frame())?;
        let mut observables = Observable::occupations(space);
        observables.extend(extra(space));
        let collapse = if self.losses {
            collapse_ops(&self.params, space)
        } else {
            Vec::new()
        };
        if collapse.is_empty() {
            propagate_schrodinger(&h, &psi, &self.grid, &observables)
        } else {
            propagate_lindblad(&h, &collapse, &psi, &self.grid, &observables)
        }
    }
}
