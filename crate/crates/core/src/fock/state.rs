use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::operator::OperatorMatrix;
use super::space::{HilbertSpace, Occupations};
use crate::error::{Error, Result};
use crate::C64;

const NORM_TOLERANCE: f64 = 1e-9;
const HERMITIAN_TOLERANCE: f64 = 1e-12;
const MIN_EIGENVALUE: f64 = -1e-8;

/// Reference frame a state is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Lab,
    Rotating,
    PolaronRotating,
}

impl Frame {
    pub fn label(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Rotating => "rotating",
            Frame::PolaronRotating => "polaron-rotating",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug)]
pub enum StateData {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

#[derive(Clone, Debug)]
pub struct QuantumState {
    space: HilbertSpace,
    data: StateData,
    frame: Frame,
}

impl QuantumState {
    pub fn pure(space: HilbertSpace, psi: DVector<C64>, frame: Frame) -> Result<Self> {
        check_len(space, psi.len())?;
        let norm = psi.norm_squared();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "pure state norm <psi|psi> = {norm:.12} is not 1"
            )));
        }
        Ok(Self {
            space,
            data: StateData::Pure(psi),
            frame,
        })
    }

    pub fn density(space: HilbertSpace, rho: DMatrix<C64>, frame: Frame) -> Result<Self> {
        check_len(space, rho.nrows())?;
        check_len(space, rho.ncols())?;
        let herm = hermiticity_error(&rho);
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (max deviation {herm:.3e})"
            )));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > NORM_TOLERANCE || trace.im.abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "density matrix trace {trace} is not 1"
            )));
        }
        let min_eig = min_eigenvalue(&rho);
        if min_eig < MIN_EIGENVALUE {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self {
            space,
            data: StateData::Density(rho),
            frame,
        })
    }

    /// Fock basis state with the given occupations.
    pub fn basis(space: HilbertSpace, occ: &Occupations, frame: Frame) -> Result<Self> {
        let index = space.index_of(occ)?;
        let mut psi = DVector::zeros(space.dim());
        psi[index] = C64::new(1.0, 0.0);
        Self::pure(space, psi, frame)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn as_pure(&self) -> Option<&DVector<C64>> {
        match &self.data {
            StateData::Pure(psi) => Some(psi),
            StateData::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DMatrix<C64>> {
        match &self.data {
            StateData::Density(rho) => Some(rho),
            StateData::Pure(_) => None,
        }
    }

    /// `|psi><psi|` for pure states; density matrices are returned unchanged.
    pub fn to_density(&self) -> QuantumState {
        match &self.data {
            StateData::Pure(psi) => Self {
                space: self.space,
                data: StateData::Density(psi * psi.adjoint()),
                frame: self.frame,
            },
            StateData::Density(_) => self.clone(),
        }
    }

    /// `<psi|psi>` or `Tr rho`.
    pub fn norm_or_trace(&self) -> f64 {
        match &self.data {
            StateData::Pure(psi) => psi.norm_squared(),
            StateData::Density(rho) => rho.trace().re,
        }
    }

    /// `<psi|A|psi>` or `Tr(rho A)`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        if op.space() != &self.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: op.dim(),
            });
        }
        Ok(match &self.data {
            StateData::Pure(psi) => expectation_pure(op, psi.as_slice()),
            StateData::Density(rho) => expectation_density(op, rho),
        })
    }

    pub(crate) fn from_parts_unchecked(space: HilbertSpace, data: StateData, frame: Frame) -> Self {
        Self { space, data, frame }
    }
}

fn check_len(space: HilbertSpace, len: usize) -> Result<()> {
    if len != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: len,
        });
    }
    Ok(())
}

pub(crate) fn expectation_pure(op: &OperatorMatrix, psi: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (r, c, v) in op.entries() {
        acc += psi[r].conj() * v * psi[c];
    }
    acc
}

/// `Tr(rho A) = sum_{r,c} A[r,c] rho[c,r]`.
pub(crate) fn expectation_density(op: &OperatorMatrix, rho: &DMatrix<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (r, c, v) in op.entries() {
        acc += v * rho[(c, r)];
    }
    acc
}

pub(crate) fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut err: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    err
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let herm = (m + m.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Mode;

    fn space() -> HilbertSpace {
        HilbertSpace::new([1, 1, 2, 2]).unwrap()
    }

    #[test]
    fn basis_expectations() {
        let s = space();
        let st = QuantumState::basis(s, &[1, 0, 0, 0], Frame::Lab).unwrap();
        let n = OperatorMatrix::number(s, Mode::Opt1);
        assert_eq!(st.expectation(&n).unwrap(), C64::new(1.0, 0.0));
        let st2 = QuantumState::basis(s, &[0, 1, 0, 0], Frame::Lab).unwrap();
        let n2 = OperatorMatrix::number(s, Mode::Opt2);
        assert_eq!(st2.expectation(&n2).unwrap(), C64::new(1.0, 0.0));
        let vac = QuantumState::basis(s, &[0, 0, 0, 0], Frame::Lab).unwrap();
        assert_eq!(vac.expectation(&n2).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_unnormalized_and_bad_density() {
        let s = space();
        let psi = DVector::from_element(s.dim(), C64::new(1.0, 0.0));
        assert!(QuantumState::pure(s, psi, Frame::Lab).is_err());

        let mut rho = DMatrix::zeros(s.dim(), s.dim());
        rho[(0, 0)] = C64::new(1.5, 0.0);
        rho[(1, 1)] = C64::new(-0.5, 0.0);
        let err = QuantumState::density(s, rho, Frame::Lab).unwrap_err();
        assert!(err.to_string().contains("negative eigenvalue"));

        let mut rho = DMatrix::zeros(s.dim(), s.dim());
        rho[(0, 0)] = C64::new(1.0, 0.0);
        rho[(0, 1)] = C64::new(0.1, 0.0);
        assert!(QuantumState::density(s, rho, Frame::Lab).is_err());
    }

    #[test]
    fn density_expectation_matches_pure() {
        let s = space();
        let mut psi = DVector::zeros(s.dim());
        psi[s.index_of(&[1, 0, 1, 0]).unwrap()] = C64::new(0.6, 0.0);
        psi[s.index_of(&[0, 1, 0, 2]).unwrap()] = C64::new(0.0, 0.8);
        let pure = QuantumState::pure(s, psi, Frame::Rotating).unwrap();
        let mixed = pure.to_density();
        assert!((mixed.norm_or_trace() - 1.0).abs() < 1e-15);
        let a = OperatorMatrix::annihilation(s, Mode::Mec2);
        let x = &a + &a.adjoint();
        let op = &x.matmul(&OperatorMatrix::number(s, Mode::Opt2))
            + &OperatorMatrix::number(s, Mode::Mec1);
        let e1 = pure.expectation(&op).unwrap();
        let e2 = mixed.expectation(&op).unwrap();
        assert!((e1 - e2).norm() < 1e-14);
    }

    #[test]
    fn mismatched_space_is_error() {
        let s = space();
        let other = HilbertSpace::new([1, 1, 1, 1]).unwrap();
        let st = QuantumState::basis(s, &[0, 0, 0, 0], Frame::Lab).unwrap();
        let n = OperatorMatrix::number(other, Mode::Opt1);
        assert!(matches!(
            st.expectation(&n),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
