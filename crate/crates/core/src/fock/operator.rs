use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use super::space::{HilbertSpace, Mode};
use crate::error::{Error, Result};
use crate::C64;

const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Sparse complex operator on a truncated four-mode Fock space.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    space: HilbertSpace,
    data: CsrMatrix<C64>,
    hermitian_hint: bool,
}

impl OperatorMatrix {
    fn from_csr(space: HilbertSpace, data: CsrMatrix<C64>, hermitian_hint: bool) -> Self {
        debug_assert_eq!(data.nrows(), space.dim());
        debug_assert_eq!(data.ncols(), space.dim());
        let data = data.filter(|_, _, v| *v != C64::new(0.0, 0.0));
        let op = Self {
            space,
            data,
            hermitian_hint,
        };
        if cfg!(debug_assertions) && hermitian_hint {
            let scale = op.max_abs().max(1.0);
            let err = op.hermiticity_error();
            assert!(
                err <= HERMITIAN_TOLERANCE * scale,
                "operator flagged Hermitian deviates by {err:e} (scale {scale:e})"
            );
        }
        op
    }

    pub fn from_triplets<I>(space: HilbertSpace, triplets: I, hermitian_hint: bool) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let dim = space.dim();
        let mut coo = CooMatrix::new(dim, dim);
        for (r, c, v) in triplets {
            coo.push(r, c, v);
        }
        Self::from_csr(space, CsrMatrix::from(&coo), hermitian_hint)
    }

    pub fn zero(space: HilbertSpace) -> Self {
        Self::from_csr(space, CsrMatrix::zeros(space.dim(), space.dim()), true)
    }

    pub fn identity(space: HilbertSpace) -> Self {
        Self::from_csr(space, CsrMatrix::identity(space.dim()), true)
    }

    /// Diagonal operator with entry `f(index)` on composite basis state `index`.
    pub fn diagonal<F>(space: HilbertSpace, f: F) -> Self
    where
        F: Fn(usize) -> f64,
    {
        let triplets = (0..space.dim()).map(|i| (i, i, C64::new(f(i), 0.0)));
        Self::from_triplets(space, triplets, true)
    }

    /// Lowering operator of `mode`, tensored with identities on the other modes.
    pub fn annihilation(space: HilbertSpace, mode: Mode) -> Self {
        let stride = space.stride(mode);
        let triplets = (0..space.dim()).filter_map(|i| {
            let n = space.occupation(i, mode);
            (n > 0).then(|| (i - stride, i, C64::new((n as f64).sqrt(), 0.0)))
        });
        Self::from_triplets(space, triplets, false)
    }

    pub fn creation(space: HilbertSpace, mode: Mode) -> Self {
        Self::annihilation(space, mode).adjoint()
    }

    pub fn number(space: HilbertSpace, mode: Mode) -> Self {
        Self::function_of_number(space, mode, |n| n as f64)
    }

    /// Diagonal operator `f(n̂)` for the occupation `n` of `mode`.
    pub fn function_of_number<F>(space: HilbertSpace, mode: Mode, f: F) -> Self
    where
        F: Fn(usize) -> f64,
    {
        let values: Vec<f64> = (0..=space.cutoff(mode)).map(f).collect();
        Self::diagonal(space, |i| values[space.occupation(i, mode)])
    }

    /// Projector onto basis states where `mode` sits at its cutoff.
    pub fn top_occupation_projector(space: HilbertSpace, mode: Mode) -> Self {
        let top = space.cutoff(mode);
        Self::function_of_number(space, mode, |n| if n == top { 1.0 } else { 0.0 })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn csr(&self) -> &CsrMatrix<C64> {
        &self.data
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn nnz(&self) -> usize {
        self.data.nnz()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let Some(row) = self.data.get_row(row) else {
            return C64::new(0.0, 0.0);
        };
        match row.col_indices().binary_search(&col) {
            Ok(k) => row.values()[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.data.triplet_iter().map(|(r, c, v)| (r, c, *v))
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.data.transpose();
        for v in t.values_mut() {
            *v = v.conj();
        }
        Self::from_csr(self.space, t, self.hermitian_hint)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut data = self.data.clone();
        for v in data.values_mut() {
            *v *= factor;
        }
        let hint = self.hermitian_hint && factor.im == 0.0;
        Self::from_csr(self.space, data, hint)
    }

    /// Marks the operator as Hermitian (checked in debug builds).
    pub fn into_hermitian(self) -> Self {
        Self::from_csr(self.space, self.data, true)
    }

    pub fn matmul(&self, rhs: &OperatorMatrix) -> Self {
        assert_eq!(self.space, rhs.space, "operators act on different spaces");
        Self::from_csr(self.space, &self.data * &rhs.data, false)
    }

    pub fn commutator(&self, rhs: &OperatorMatrix) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Integer power `A^k`; `A^0` is the identity.
    pub fn pow(&self, k: usize) -> Self {
        let mut result = Self::identity(self.space);
        for _ in 0..k {
            result = result.matmul(self);
        }
        result.hermitian_hint = self.hermitian_hint;
        result
    }

    pub fn max_abs(&self) -> f64 {
        self.data.values().iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        (self - other).max_abs()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut adj = self.data.transpose();
        for v in adj.values_mut() {
            *v = v.conj();
        }
        (&self.data - &adj)
            .values()
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Maximum absolute row sum (induced infinity norm).
    pub fn row_sum_norm(&self) -> f64 {
        self.data
            .row_iter()
            .map(|row| row.values().iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `y += alpha * A x` on raw slices.
    pub fn apply_add(&self, alpha: C64, x: &[C64], y: &mut [C64]) {
        csr_apply_add(&self.data, alpha, x, y);
    }

    pub fn apply(&self, x: &DVector<C64>) -> Result<DVector<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let mut y = DVector::zeros(self.dim());
        self.apply_add(C64::new(1.0, 0.0), x.as_slice(), y.as_mut_slice());
        Ok(y)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Restriction `P A P` onto a smaller space embedded by occupation numbers.
    pub fn restrict_to(&self, target: HilbertSpace) -> Result<Self> {
        if !self.space.contains(&target) {
            return Err(Error::InvalidParameter(format!(
                "cannot restrict operator on {} to larger space {}",
                self.space, target
            )));
        }
        let mut triplets = Vec::new();
        for (r, c, v) in self.entries() {
            let (ro, co) = (self.space.occupations(r), self.space.occupations(c));
            if let (Ok(ri), Ok(ci)) = (target.index_of(&ro), target.index_of(&co)) {
                triplets.push((ri, ci, v));
            }
        }
        Ok(Self::from_triplets(target, triplets, self.hermitian_hint))
    }

    fn combine(&self, rhs: &OperatorMatrix, sign: f64) -> Self {
        assert_eq!(self.space, rhs.space, "operators act on different spaces");
        let data = if sign > 0.0 {
            &self.data + &rhs.data
        } else {
            &self.data - &rhs.data
        };
        Self::from_csr(self.space, data, self.hermitian_hint && rhs.hermitian_hint)
    }
}

/// `y += alpha * A x` for a CSR matrix.
pub(crate) fn csr_apply_add(a: &CsrMatrix<C64>, alpha: C64, x: &[C64], y: &mut [C64]) {
    let offsets = a.row_offsets();
    let cols = a.col_indices();
    let vals = a.values();
    for (r, yr) in y.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for k in offsets[r]..offsets[r + 1] {
            acc += vals[k] * x[cols[k]];
        }
        *yr += alpha * acc;
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.matmul(rhs)
    }
}

impl Mul<f64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: f64) -> OperatorMatrix {
        self.scaled(C64::new(rhs, 0.0))
    }
}

impl Mul<C64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: C64) -> OperatorMatrix {
        self.scaled(rhs)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scaled(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(c: [usize; 4]) -> HilbertSpace {
        HilbertSpace::new(c).unwrap()
    }

    #[test]
    fn annihilation_lowers_single_photon() {
        let s = space([2, 2, 1, 1]);
        let a = OperatorMatrix::annihilation(s, Mode::Opt1);
        let one = s.index_of(&[1, 0, 0, 0]).unwrap();
        let mut x = DVector::zeros(s.dim());
        x[one] = C64::new(1.0, 0.0);
        let y = a.apply(&x).unwrap();
        assert!((y[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(y.iter().skip(1).all(|v| v.norm() == 0.0));

        let mut vac = DVector::zeros(s.dim());
        vac[0] = C64::new(1.0, 0.0);
        assert!(a.apply(&vac).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn single_mode_ladder_entries() {
        let s = space([0, 0, 3, 0]);
        let b = OperatorMatrix::annihilation(s, Mode::Mec1);
        let mut values: Vec<f64> = b.entries().map(|(_, _, v)| v.re).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [1.0, 2f64.sqrt(), 3f64.sqrt()];
        assert_eq!(values.len(), 3);
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn number_equals_adag_a() {
        let s = space([5, 1, 5, 1]);
        for mode in Mode::ALL {
            let a = OperatorMatrix::annihilation(s, mode);
            let n = OperatorMatrix::number(s, mode);
            let ada = a.adjoint().matmul(&a);
            assert!(n.max_abs_diff(&ada) <= 1e-14);
        }
    }

    #[test]
    fn function_of_number_cases() {
        let s = space([2, 1, 2, 1]);
        let id = OperatorMatrix::function_of_number(s, Mode::Mec1, |_| 1.0);
        assert!(id.max_abs_diff(&OperatorMatrix::identity(s)) == 0.0);
        let n = OperatorMatrix::function_of_number(s, Mode::Opt2, |n| n as f64);
        assert!(n.max_abs_diff(&OperatorMatrix::number(s, Mode::Opt2)) == 0.0);
        let parity =
            OperatorMatrix::function_of_number(
                s,
                Mode::Mec1,
                |n| {
                    if n % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                },
            );
        for i in 0..s.dim() {
            let m = s.occupation(i, Mode::Mec1);
            let expected = [1.0, -1.0, 1.0][m];
            assert_eq!(parity.get(i, i).re, expected);
        }
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let s = space([3, 2, 4, 2]);
        for mode in Mode::ALL {
            let a = OperatorMatrix::annihilation(s, mode);
            let comm = a.commutator(&a.adjoint());
            for i in 0..s.dim() {
                let n = s.occupation(i, mode);
                let expected = if n < s.cutoff(mode) { 1.0 } else { -(n as f64) };
                assert!((comm.get(i, i) - C64::new(expected, 0.0)).norm() < 1e-14);
            }
            assert_eq!(comm.nnz(), s.dim());
        }
    }

    #[test]
    fn different_modes_commute() {
        let s = space([2, 2, 3, 3]);
        for m1 in Mode::ALL {
            for m2 in Mode::ALL {
                if m1 == m2 {
                    continue;
                }
                let a = OperatorMatrix::annihilation(s, m1);
                let b = OperatorMatrix::annihilation(s, m2);
                assert!(a.commutator(&b).max_abs() <= 1e-13);
                assert!(a.commutator(&b.adjoint()).max_abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn restriction_of_normal_ordered_products_is_exact() {
        let big = space([1, 1, 5, 2]);
        let small = space([1, 1, 2, 2]);
        let bb = OperatorMatrix::annihilation(big, Mode::Mec1);
        let bs = OperatorMatrix::annihilation(small, Mode::Mec1);
        let big_prod = bb.adjoint().pow(2).matmul(&bb);
        let small_prod = bs.adjoint().pow(2).matmul(&bs);
        let restricted = big_prod.restrict_to(small).unwrap();
        assert!(restricted.max_abs_diff(&small_prod) < 1e-14);
    }
}
