use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Frame, HilbertSpace, Occupations, QuantumState};
use crate::C64;

/// One basis component `amplitude |n_opt1, n_opt2, n_mec1, n_mec2>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateTerm {
    pub amplitude: [f64; 2],
    pub occupations: Occupations,
}

/// Superposition of Fock basis states, normalized when built.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialStateSpec {
    pub terms: Vec<StateTerm>,
}

impl InitialStateSpec {
    pub fn basis(occupations: Occupations) -> Self {
        Self {
            terms: vec![StateTerm {
                amplitude: [1.0, 0.0],
                occupations,
            }],
        }
    }

    pub fn vacuum() -> Self {
        Self::basis([0; 4])
    }

    /// Product of an optical superposition `sum c |n1, n2>_opt` and a
    /// mechanical one `sum d |m1, m2>_mec`, with real amplitudes.
    pub fn product(optical: &[(f64, [usize; 2])], mechanical: &[(f64, [usize; 2])]) -> Self {
        let mut terms = Vec::new();
        for &(c, [n1, n2]) in optical {
            for &(d, [m1, m2]) in mechanical {
                terms.push(StateTerm {
                    amplitude: [c * d, 0.0],
                    occupations: [n1, n2, m1, m2],
                });
            }
        }
        Self { terms }
    }

    /// `(cos(pi/3)|1,0> + sin(pi/3)|0,1>)_opt (x) |m1, m2>_mec`.
    pub fn split_photon(mechanical: [usize; 2]) -> Self {
        Self::product(
            &[((PI / 3.0).cos(), [1, 0]), ((PI / 3.0).sin(), [0, 1])],
            &[(1.0, mechanical)],
        )
    }

    /// `|n1, n2>_opt (x) (cos(pi/3)|1,0> + sin(pi/3)|0,1>)_mec`.
    pub fn split_phonon(optical: [usize; 2]) -> Self {
        Self::product(
            &[(1.0, optical)],
            &[((PI / 3.0).cos(), [1, 0]), ((PI / 3.0).sin(), [0, 1])],
        )
    }

    /// Largest occupation requested per mode.
    pub fn max_occupations(&self) -> Occupations {
        let mut out = [0; 4];
        for t in &self.terms {
            for k in 0..4 {
                out[k] = out[k].max(t.occupations[k]);
            }
        }
        out
    }
}

/// Normalized pure state for `spec`; repeated occupations add up.
pub fn build_initial_state(
    space: HilbertSpace,
    spec: &InitialStateSpec,
    frame: Frame,
) -> Result<QuantumState> {
    let mut psi = DVector::from_element(space.dim(), C64::new(0.0, 0.0));
    for term in &spec.terms {
        let [re, im] = term.amplitude;
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::InvalidState(format!(
                "non-finite amplitude for {:?}",
                term.occupations
            )));
        }
        let index = space.index_of(&term.occupations).map_err(|_| {
            Error::InvalidState(format!(
                "occupations {:?} exceed cutoffs {:?}",
                term.occupations,
                space.cutoffs()
            ))
        })?;
        psi[index] += C64::new(re, im);
    }
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::InvalidState(
            "initial state has zero norm".to_string(),
        ));
    }
    psi.unscale_mut(norm);
    QuantumState::pure(space, psi, frame)
}
