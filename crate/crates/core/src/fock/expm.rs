//! Action of operator exponentials on vectors by scaled Taylor series.

use nalgebra::DVector;

use super::operator::OperatorMatrix;
use super::state::{QuantumState, StateData};
use crate::error::{Error, Result};
use crate::C64;

/// Relative size of the last retained Taylor term in each sub-step.
const TERM_TOLERANCE: f64 = 1e-16;
const MAX_TERMS: usize = 64;
const UNITARY_NORM_TOLERANCE: f64 = 1e-9;

/// `exp(scale * A) v`.
///
/// The exponent is split into `m` sub-steps with `|scale| * ||A||_inf / m <= 1`
/// and each sub-step is summed until the next term falls below machine
/// precision relative to the partial sum.
pub fn expm_multiply(op: &OperatorMatrix, v: &DVector<C64>, scale: C64) -> Result<DVector<C64>> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: v.len(),
        });
    }
    let norm = scale.norm() * op.row_sum_norm();
    if norm == 0.0 {
        return Ok(v.clone());
    }
    let steps = norm.ceil().max(1.0) as usize;
    let h = scale / steps as f64;

    let mut result = v.clone();
    let mut term = DVector::zeros(v.len());
    let mut next = DVector::zeros(v.len());
    for _ in 0..steps {
        term.copy_from(&result);
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for k in 1..=MAX_TERMS {
            next.fill(C64::new(0.0, 0.0));
            op.apply_add(h / k as f64, term.as_slice(), next.as_mut_slice());
            std::mem::swap(&mut term, &mut next);
            result += &term;
            residual = term.norm();
            if residual <= TERM_TOLERANCE * result.norm().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        if !converged && residual > 1e-10 * result.norm() {
            return Err(Error::NonConvergence {
                iterations: MAX_TERMS,
                residual,
            });
        }
    }
    Ok(result)
}

/// `exp(scale * A)|psi>` for a pure state.
///
/// Intended for unitary exponents (anti-Hermitian `scale * A`); a result whose
/// norm drifts from 1 by more than 1e-9 is reported as an invalid state.
pub fn matrix_exp_apply(
    op: &OperatorMatrix,
    state: &QuantumState,
    scale: C64,
) -> Result<QuantumState> {
    let psi = state
        .as_pure()
        .ok_or_else(|| Error::InvalidState("matrix_exp_apply expects a pure state".to_string()))?;
    if op.space() != state.space() {
        return Err(Error::DimensionMismatch {
            expected: state.space().dim(),
            found: op.dim(),
        });
    }
    let out = expm_multiply(op, psi, scale)?;
    let norm = out.norm_squared();
    if (norm - 1.0).abs() > UNITARY_NORM_TOLERANCE {
        return Err(Error::InvalidState(format!(
            "exponential is not norm preserving (|psi|^2 = {norm:.12})"
        )));
    }
    Ok(QuantumState::from_parts_unchecked(
        *state.space(),
        StateData::Pure(out),
        state.frame(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Frame, HilbertSpace, Mode};

    #[test]
    fn zero_scale_is_identity() {
        let s = HilbertSpace::new([1, 1, 3, 1]).unwrap();
        let st = QuantumState::basis(s, &[1, 0, 2, 1], Frame::Lab).unwrap();
        let a = OperatorMatrix::annihilation(s, Mode::Mec1);
        let out = matrix_exp_apply(&a, &st, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(out.as_pure().unwrap(), st.as_pure().unwrap());
    }

    #[test]
    fn number_phase() {
        let s = HilbertSpace::new([0, 0, 4, 0]).unwrap();
        let theta = 0.7;
        let n = OperatorMatrix::number(s, Mode::Mec1);
        let mut psi = DVector::from_element(s.dim(), C64::new(1.0, 0.0));
        psi /= C64::new((s.dim() as f64).sqrt(), 0.0);
        let st = QuantumState::pure(s, psi.clone(), Frame::Lab).unwrap();
        let out = matrix_exp_apply(&n, &st, C64::new(0.0, theta)).unwrap();
        let out = out.as_pure().unwrap();
        for m in 0..s.dim() {
            let expected = psi[m] * C64::from_polar(1.0, theta * m as f64);
            assert!((out[m] - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn displacement_of_vacuum() {
        let s = HilbertSpace::new([0, 0, 20, 0]).unwrap();
        let b = OperatorMatrix::annihilation(s, Mode::Mec1);
        let gen = &b.adjoint() - &b;
        let vac = QuantumState::basis(s, &[0, 0, 0, 0], Frame::Lab).unwrap();
        let alpha = 0.3;
        let out = matrix_exp_apply(&gen, &vac, C64::new(alpha, 0.0)).unwrap();
        let n = out
            .expectation(&OperatorMatrix::number(s, Mode::Mec1))
            .unwrap();
        assert!((n.re - alpha * alpha).abs() < 1e-8, "{n}");
        // Coherent amplitudes e^{-a^2/2} a^m / sqrt(m!)
        let psi = out.as_pure().unwrap();
        let mut fact = 1.0;
        for m in 0..6 {
            if m > 0 {
                fact *= m as f64;
            }
            let expected = (-alpha * alpha / 2.0).exp() * alpha.powi(m as i32) / fact.sqrt();
            assert!((psi[m].re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn density_input_rejected() {
        let s = HilbertSpace::new([1, 0, 0, 0]).unwrap();
        let st = QuantumState::basis(s, &[0, 0, 0, 0], Frame::Lab)
            .unwrap()
            .to_density();
        let a = OperatorMatrix::number(s, Mode::Opt1);
        assert!(matrix_exp_apply(&a, &st, C64::new(0.0, 1.0)).is_err());
    }
}
