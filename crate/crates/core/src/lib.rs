//! Simulation of two evanescently coupled optomechanical nanobeams.
//!
//! The crate builds the driven four-mode Hamiltonian (two optical cavities,
//! two isolated mechanical resonators), its rotating-frame and polaron-frame
//! forms, and the three sideband-selected effective models: a mechanically
//! controlled optical beam splitter, an optically controlled mechanical
//! coupler, and optically controlled two-mode squeezing. States are propagated
//! under the Schrödinger or Lindblad equation on truncated Fock spaces and the
//! simulated exchange periods are compared with closed-form predictions.
//!
//! Units: `hbar = 1`, rates in rad/s. Simulations are run on parameters scaled
//! by the first mechanical frequency, so times are in units of `1/nu_1`.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod model;
pub mod parallel;
pub mod scenario;
pub mod special;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
