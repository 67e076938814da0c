use nalgebra_sparse::CsrMatrix;

use crate::fock::{HilbertSpace, OperatorMatrix};
use crate::C64;

/// `op` multiplied by `exp(i * frequency * t)`.
#[derive(Clone, Debug)]
pub struct OscillatingTerm {
    pub frequency: f64,
    pub op: OperatorMatrix,
}

/// `H(t) = H_static + sum_k exp(i w_k t) O_k`.
///
/// Terms with equal frequency are merged on insertion so that evaluation cost
/// scales with the number of distinct frequencies. Hermiticity of `H(t)` is
/// the constructor's responsibility (add terms in conjugate pairs).
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    static_part: OperatorMatrix,
    terms: Vec<OscillatingTerm>,
}

impl Hamiltonian {
    pub fn new(static_part: OperatorMatrix) -> Self {
        Self {
            static_part,
            terms: Vec::new(),
        }
    }

    pub fn zero(space: HilbertSpace) -> Self {
        Self::new(OperatorMatrix::zero(space))
    }

    pub fn space(&self) -> &HilbertSpace {
        self.static_part.space()
    }

    pub fn static_part(&self) -> &OperatorMatrix {
        &self.static_part
    }

    pub fn terms(&self) -> &[OscillatingTerm] {
        &self.terms
    }

    pub fn is_time_independent(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_static(&mut self, op: &OperatorMatrix) {
        self.static_part = &self.static_part + op;
    }

    pub fn add_oscillating(&mut self, frequency: f64, op: &OperatorMatrix) {
        if frequency == 0.0 {
            self.add_static(op);
            return;
        }
        let tol = 1e-12 * frequency.abs().max(1.0);
        if let Some(term) = self
            .terms
            .iter_mut()
            .find(|t| (t.frequency - frequency).abs() <= tol)
        {
            term.op = &term.op + op;
        } else {
            self.terms.push(OscillatingTerm {
                frequency,
                op: op.clone(),
            });
        }
    }

    /// Adds `exp(i w t) O + exp(-i w t) O^dagger`.
    pub fn add_conjugate_pair(&mut self, frequency: f64, op: &OperatorMatrix) {
        self.add_oscillating(frequency, op);
        self.add_oscillating(-frequency, &op.adjoint());
    }

    /// Sparse matrix of `H(t)`.
    pub fn at(&self, t: f64) -> OperatorMatrix {
        let mut h = self.static_part.clone();
        for term in &self.terms {
            let phase = C64::from_polar(1.0, term.frequency * t);
            h = &h + &term.op.scaled(phase);
        }
        h
    }

    pub fn evaluator(&self) -> HamiltonianEvaluator<'_> {
        HamiltonianEvaluator::new(self)
    }
}

/// Scratch matrix holding `H(t)` on the union sparsity pattern of all terms;
/// re-evaluation only rewrites values.
pub struct HamiltonianEvaluator<'a> {
    hamiltonian: &'a Hamiltonian,
    matrix: CsrMatrix<C64>,
    static_positions: Vec<usize>,
    term_positions: Vec<Vec<usize>>,
    last_t: Option<f64>,
}

impl<'a> HamiltonianEvaluator<'a> {
    fn new(hamiltonian: &'a Hamiltonian) -> Self {
        let dim = hamiltonian.space().dim();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); dim];
        let all_ops = std::iter::once(&hamiltonian.static_part)
            .chain(hamiltonian.terms.iter().map(|t| &t.op));
        for op in all_ops {
            for (r, c, _) in op.entries() {
                rows[r].push(c);
            }
        }
        let mut row_offsets = Vec::with_capacity(dim + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            col_indices.extend_from_slice(row);
            row_offsets.push(col_indices.len());
        }
        let nnz = col_indices.len();
        let matrix = CsrMatrix::try_from_csr_data(
            dim,
            dim,
            row_offsets,
            col_indices,
            vec![C64::new(0.0, 0.0); nnz],
        )
        .expect("union pattern is a valid CSR layout");

        let positions = |op: &OperatorMatrix| -> Vec<usize> {
            op.entries()
                .map(|(r, c, _)| {
                    let start = matrix.row_offsets()[r];
                    let end = matrix.row_offsets()[r + 1];
                    start
                        + matrix.col_indices()[start..end]
                            .binary_search(&c)
                            .expect("entry belongs to the union pattern")
                })
                .collect()
        };
        let static_positions = positions(&hamiltonian.static_part);
        let term_positions = hamiltonian.terms.iter().map(|t| positions(&t.op)).collect();
        Self {
            hamiltonian,
            matrix,
            static_positions,
            term_positions,
            last_t: None,
        }
    }

    /// `H(t)` on the union pattern.
    pub fn at(&mut self, t: f64) -> &CsrMatrix<C64> {
        let unchanged = match self.last_t {
            Some(last) => last == t || self.hamiltonian.terms.is_empty(),
            None => false,
        };
        if unchanged {
            return &self.matrix;
        }
        let values = self.matrix.values_mut();
        values.fill(C64::new(0.0, 0.0));
        let static_values = self.hamiltonian.static_part.csr().values();
        for (pos, v) in self.static_positions.iter().zip(static_values) {
            values[*pos] += *v;
        }
        for (term, positions) in self.hamiltonian.terms.iter().zip(&self.term_positions) {
            let phase = C64::from_polar(1.0, term.frequency * t);
            for (pos, v) in positions.iter().zip(term.op.csr().values()) {
                values[*pos] += phase * *v;
            }
        }
        self.last_t = Some(t);
        &self.matrix
    }
}
