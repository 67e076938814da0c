//! Truncated Fock spaces for the four bosonic modes and the operator algebra
//! built on them.

mod expm;
mod operator;
mod space;
mod state;

pub use expm::{expm_multiply, matrix_exp_apply};
pub(crate) use operator::csr_apply_add;
pub use operator::OperatorMatrix;
pub use space::{HilbertSpace, Mode, Nanobeam, Occupations, DEFAULT_DIMENSION_LIMIT, MODE_COUNT};
pub(crate) use state::{expectation_density, expectation_pure};
pub use state::{min_eigenvalue, Frame, QuantumState, StateData};
