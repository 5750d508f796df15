//! Linear index codes from representing matrices.
//!
//! The sender broadcasts `y = E x`, where the rows of `E` are a row basis
//! of a matrix `M` representing the knowledge graph. Receiver `i` writes
//! `Row_i(M) = lambda_i E`, so `lambda_i . y = sum_j M[i][j] x_j`; every term
//! with `j != i` is either zero or an index it already knows, which leaves
//! `M[i][i] x_i`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{FieldError, FieldSpec};
use crate::graph::{DiGraph, GraphError};
use crate::matrix::{dot, Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexCodeError {
    #[error("matrix does not represent the graph")]
    NotRepresenting,
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("receiver {0} does not exist")]
    NoSuchReceiver(usize),
    #[error("receiver {receiver} is missing side information x_{index}")]
    MissingSideInformation { receiver: usize, index: usize },
    #[error("receiver {receiver} was given x_{index}, which it does not hold")]
    UnexpectedSideInformation { receiver: usize, index: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// What receiver `i` needs besides the broadcast.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    /// Coefficients with `Row_i(M) = lambda . E`.
    pub lambda: Vec<u32>,
    /// `M[i][j]` for every `j` in the side-information set, zero or not.
    pub side_coefficients: BTreeMap<usize, u32>,
    pub diagonal: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearIndexCode {
    n: usize,
    field: FieldSpec,
    /// `k x n`; its rows are rows `basis_rows` of `M`.
    encoding: Matrix,
    basis_rows: Vec<usize>,
    receivers: Vec<Receiver>,
}

impl LinearIndexCode {
    /// Builds the code for knowledge graph `g` from a matrix representing it.
    pub fn build(g: &DiGraph, m: &Matrix) -> Result<Self, IndexCodeError> {
        if !g.is_represented_by(m)? {
            return Err(IndexCodeError::NotRepresenting);
        }
        let n = g.n();
        let field = m.field();
        let natural: Vec<usize> = (0..n).collect();
        let basis_rows = m.greedy_row_basis(&natural)?;
        let encoding = m.submatrix(&basis_rows, &natural)?;
        let et = encoding.transpose();
        let mut receivers = Vec::with_capacity(n);
        for i in 0..n {
            let lambda = et.solve(m.row(i))?.expect("every row lies in the span of a row basis");
            let side_coefficients = g.out_neighbors(i).map(|j| (j, m.get(i, j))).collect();
            receivers.push(Receiver { lambda, side_coefficients, diagonal: m.get(i, i) });
        }
        Ok(LinearIndexCode { n, field, encoding, basis_rows, receivers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Broadcast length, equal to `rank(M)`.
    pub fn k(&self) -> usize {
        self.basis_rows.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn encoding(&self) -> &Matrix {
        &self.encoding
    }

    pub fn basis_rows(&self) -> &[usize] {
        &self.basis_rows
    }

    pub fn receiver(&self, i: usize) -> Option<&Receiver> {
        self.receivers.get(i)
    }

    /// `y = E x`.
    pub fn broadcast(&self, x: &[u32]) -> Result<Vec<u32>, IndexCodeError> {
        if x.len() != self.n {
            return Err(IndexCodeError::LengthMismatch { expected: self.n, got: x.len() });
        }
        for &v in x {
            self.field.elem(v)?;
        }
        Ok(self.encoding.mul_vec(x)?)
    }

    /// The side information receiver `i` holds for message `x`.
    pub fn side_information(&self, i: usize, x: &[u32]) -> Result<BTreeMap<usize, u32>, IndexCodeError> {
        let r = self.receivers.get(i).ok_or(IndexCodeError::NoSuchReceiver(i))?;
        if x.len() != self.n {
            return Err(IndexCodeError::LengthMismatch { expected: self.n, got: x.len() });
        }
        Ok(r.side_coefficients.keys().map(|&j| (j, x[j])).collect())
    }

    /// Recovers `x_i` from the broadcast and exactly the indices receiver `i`
    /// holds.
    pub fn decode_symbol(&self, i: usize, y: &[u32], side: &BTreeMap<usize, u32>) -> Result<u32, IndexCodeError> {
        let r = self.receivers.get(i).ok_or(IndexCodeError::NoSuchReceiver(i))?;
        if y.len() != self.k() {
            return Err(IndexCodeError::LengthMismatch { expected: self.k(), got: y.len() });
        }
        if let Some(&index) = side.keys().find(|j| !r.side_coefficients.contains_key(j)) {
            return Err(IndexCodeError::UnexpectedSideInformation { receiver: i, index });
        }
        let f = self.field;
        let mut acc = dot(f, &r.lambda, y);
        for (&j, &c) in &r.side_coefficients {
            let xj = *side.get(&j).ok_or(IndexCodeError::MissingSideInformation { receiver: i, index: j })?;
            acc = f.sub(acc, f.mul(c, xj % f.order()));
        }
        Ok(f.mul(acc, f.inv(r.diagonal)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::clique_cover_upper_bound;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u32) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    fn decode_all(code: &LinearIndexCode, x: &[u32]) -> Vec<u32> {
        let y = code.broadcast(x).unwrap();
        (0..code.n()).map(|i| code.decode_symbol(i, &y, &code.side_information(i, x).unwrap()).unwrap()).collect()
    }

    #[test]
    fn complete_graph_broadcasts_the_sum() {
        let g = DiGraph::complete(3).unwrap();
        let code = LinearIndexCode::build(&g, &Matrix::ones(3, 3, f(2))).unwrap();
        assert_eq!(code.k(), 1);
        assert_eq!(code.encoding(), &Matrix::ones(1, 3, f(2)));
        for i in 0..3 {
            assert_eq!(code.receiver(i).unwrap().lambda, vec![1]);
        }
        let x = [1, 1, 0];
        let y = code.broadcast(&x).unwrap();
        assert_eq!(y, vec![0]);
        let side = BTreeMap::from([(1, 1), (2, 0)]);
        assert_eq!(code.decode_symbol(0, &y, &side).unwrap(), 1);
        assert_eq!(decode_all(&code, &x), x);
    }

    #[test]
    fn identity_code_sends_everything() {
        let g = DiGraph::empty(4).unwrap();
        let code = LinearIndexCode::build(&g, &Matrix::identity(4, f(5))).unwrap();
        assert_eq!(code.k(), 4);
        assert_eq!(code.encoding(), &Matrix::identity(4, f(5)));
        for i in 0..4 {
            let mut unit = vec![0; 4];
            unit[i] = 1;
            assert_eq!(code.receiver(i).unwrap().lambda, unit);
        }
        let x = [3, 0, 4, 1];
        assert_eq!(code.broadcast(&x).unwrap(), x.to_vec());
        assert_eq!(decode_all(&code, &x), x);
    }

    #[test]
    fn broadcast_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = DiGraph::sample_gnp(12, 0.5, 7).unwrap();
        let field = f(3);
        let code = LinearIndexCode::build(&g, &clique_cover_upper_bound(&g, 20).witness(field)).unwrap();
        for _ in 0..50 {
            let x: Vec<u32> = (0..12).map(|_| rng.gen_range(0..3)).collect();
            let x2: Vec<u32> = (0..12).map(|_| rng.gen_range(0..3)).collect();
            let sum: Vec<u32> = x.iter().zip(&x2).map(|(&a, &b)| field.add(a, b)).collect();
            let y: Vec<u32> = code
                .broadcast(&x)
                .unwrap()
                .iter()
                .zip(code.broadcast(&x2).unwrap())
                .map(|(&a, b)| field.add(a, b))
                .collect();
            assert_eq!(code.broadcast(&sum).unwrap(), y);
        }
    }

    #[test]
    fn arbitrary_representing_matrices_decode() {
        // random arc values, random nonzero diagonal, several fields
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..60 {
            let q = [2, 3, 5, 7][trial % 4];
            let n = rng.gen_range(1..=10);
            let g = DiGraph::sample_gnp(n, rng.gen_range(0.1..0.9), rng.gen()).unwrap();
            let m = Matrix::from_fn(n, n, f(q), |i, j| {
                if i == j {
                    rng.gen_range(1..q)
                } else if g.has_arc(i, j) {
                    rng.gen_range(0..q)
                } else {
                    0
                }
            });
            let code = LinearIndexCode::build(&g, &m).unwrap();
            assert_eq!(code.k(), m.rank());
            for _ in 0..10 {
                let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                assert_eq!(decode_all(&code, &x), x);
            }
        }
    }

    #[test]
    fn cover_code_length_is_color_count() {
        let g = DiGraph::sample_gnp(64, 0.5, 11).unwrap();
        let cover = clique_cover_upper_bound(&g, 20);
        let w = cover.witness(f(2));
        let code = LinearIndexCode::build(&g, &w).unwrap();
        assert_eq!(code.k(), cover.num_colors);
        assert_eq!(code.k(), w.rank());
    }

    #[test]
    fn errors() {
        let g = DiGraph::from_arcs(3, [(0, 1)]).unwrap();
        assert_eq!(LinearIndexCode::build(&g, &Matrix::ones(3, 3, f(2))), Err(IndexCodeError::NotRepresenting));
        assert!(LinearIndexCode::build(&g, &Matrix::identity(2, f(2))).is_err());
        let code = LinearIndexCode::build(&g, &Matrix::identity(3, f(2))).unwrap();
        assert!(matches!(code.broadcast(&[1, 0]), Err(IndexCodeError::LengthMismatch { .. })));
        assert!(matches!(code.broadcast(&[1, 0, 2]), Err(IndexCodeError::Field(_))));
        let y = code.broadcast(&[1, 0, 1]).unwrap();
        assert_eq!(
            code.decode_symbol(0, &y, &BTreeMap::new()),
            Err(IndexCodeError::MissingSideInformation { receiver: 0, index: 1 })
        );
        assert_eq!(
            code.decode_symbol(1, &y, &BTreeMap::from([(0, 1)])),
            Err(IndexCodeError::UnexpectedSideInformation { receiver: 1, index: 0 })
        );
        assert_eq!(code.decode_symbol(3, &y, &BTreeMap::new()), Err(IndexCodeError::NoSuchReceiver(3)));
        assert!(matches!(code.decode_symbol(1, &y[..2], &BTreeMap::new()), Err(IndexCodeError::LengthMismatch { .. })));
    }
}
