//! Row/column basis encoding of low-rank matrices.
//!
//! A rank-`k` matrix is determined by `k` independent rows, `k` independent
//! columns and their indices. [`encode`] extracts such a pair greedily in
//! natural index order; [`decode`] rebuilds the matrix by solving against
//! the `k x k` intersection block, which is always invertible.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldSpec;
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("malformed encoding: {0}")]
    Malformed(String),
    #[error("enumeration needs {required} matrices, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEncoding {
    pub n: usize,
    pub field: FieldSpec,
    /// Strictly increasing row indices `i_1 < .. < i_k`.
    pub row_indices: Vec<usize>,
    /// The rows at `row_indices`, each of length `n`.
    pub rows: Vec<Vec<u32>>,
    /// Strictly increasing column indices `j_1 < .. < j_k`.
    pub col_indices: Vec<usize>,
    /// The columns at `col_indices`, each of length `n`.
    pub cols: Vec<Vec<u32>>,
}

impl BasisEncoding {
    pub fn rank(&self) -> usize {
        self.row_indices.len()
    }

    /// Field elements stored in the two bases (`2kn`).
    pub fn field_elements(&self) -> usize {
        2 * self.rank() * self.n
    }

    /// Size of the `2k` indices measured in field symbols, `2k * ceil(log_q n)`.
    pub fn index_symbols(&self) -> usize {
        2 * self.rank() * symbols_per_index(self.n, self.field.order())
    }

    /// The `k x k` block at the stored rows and columns.
    pub fn intersection(&self) -> Matrix {
        let k = self.rank();
        Matrix::from_fn(k, k, self.field, |t, s| self.rows[t][self.col_indices[s]])
    }

    fn validate(&self) -> Result<(), CodecError> {
        let k = self.rank();
        let bad = |m: String| Err(CodecError::Malformed(m));
        if self.col_indices.len() != k || self.rows.len() != k || self.cols.len() != k {
            return bad(format!(
                "inconsistent basis sizes: {} row indices, {} rows, {} column indices, {} columns",
                k,
                self.rows.len(),
                self.col_indices.len(),
                self.cols.len()
            ));
        }
        if self.n == 0 || k > self.n {
            return bad(format!("rank {k} impossible in dimension {}", self.n));
        }
        for (name, idx) in [("row", &self.row_indices), ("column", &self.col_indices)] {
            if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= self.n) {
                return bad(format!("{name} indices {idx:?} not strictly increasing in 0..{}", self.n));
            }
        }
        let q = self.field.order();
        for v in self.rows.iter().chain(&self.cols) {
            if v.len() != self.n {
                return bad(format!("basis vector of length {} in dimension {}", v.len(), self.n));
            }
            if let Some(&x) = v.iter().find(|&&x| x >= q) {
                return bad(format!("entry {x} outside {}", self.field));
            }
        }
        // Stored rows and columns must agree where they cross.
        for (t, &i) in self.row_indices.iter().enumerate() {
            for (s, &j) in self.col_indices.iter().enumerate() {
                if self.rows[t][j] != self.cols[s][i] {
                    return bad(format!("row {i} and column {j} disagree at their crossing"));
                }
            }
        }
        if k == 0 {
            return Ok(());
        }
        let row_block = Matrix::from_rows(self.field, &self.rows)?;
        if row_block.rank() != k {
            return bad("stored rows are linearly dependent".into());
        }
        let col_block = Matrix::from_rows(self.field, &self.cols)?;
        if col_block.rank() != k {
            return bad("stored columns are linearly dependent".into());
        }
        if self.intersection().rank() != k {
            return bad("intersection block is singular".into());
        }
        Ok(())
    }
}

fn symbols_per_index(n: usize, q: u32) -> usize {
    // smallest e with q^e >= n
    let mut e = 0;
    let mut reach = 1u128;
    while reach < n as u128 {
        reach *= q as u128;
        e += 1;
    }
    e
}

/// Encodes a square matrix by its greedy row and column bases.
pub fn encode(m: &Matrix) -> Result<BasisEncoding, CodecError> {
    m.require_square()?;
    let n = m.rows();
    let natural: Vec<usize> = (0..n).collect();
    let mut row_indices = m.greedy_row_basis(&natural)?;
    let mut col_indices = m.greedy_column_basis(&natural)?;
    row_indices.sort_unstable();
    col_indices.sort_unstable();
    Ok(BasisEncoding {
        n,
        field: m.field(),
        rows: row_indices.iter().map(|&i| m.row(i).to_vec()).collect(),
        cols: col_indices.iter().map(|&j| m.col(j)).collect(),
        row_indices,
        col_indices,
    })
}

/// Rebuilds the unique matrix with the given bases.
pub fn decode(enc: &BasisEncoding) -> Result<Matrix, CodecError> {
    enc.validate()?;
    let n = enc.n;
    let f = enc.field;
    let k = enc.rank();
    let mut out = Matrix::zeros(n, n, f);
    if k == 0 {
        return Ok(out);
    }
    let block = enc.intersection();
    for c in 0..n {
        // Column c restricted to the basis rows determines its coefficients
        // against the stored columns.
        let top: Vec<u32> = (0..k).map(|t| enc.rows[t][c]).collect();
        let alpha = block.solve(&top)?.ok_or_else(|| CodecError::Malformed("intersection block is singular".into()))?;
        for r in 0..n {
            let v = (0..k).fold(0, |acc, s| f.add(acc, f.mul(alpha[s], enc.cols[s][r])));
            out.set(r, c, v);
        }
    }
    Ok(out)
}

/// Default enumeration budget for [`sparse_base_census`]: every 3x3 matrix
/// over `F_2`.
pub const DEFAULT_COUNT_BUDGET: u128 = 512;

/// Per-matrix data gathered by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub rank: usize,
    /// Fewest nonzeros over all row bases.
    pub min_row_basis_sparsity: usize,
    /// Fewest nonzeros over all column bases.
    pub min_col_basis_sparsity: usize,
}

/// Every `n x n` matrix over a field, with its rank and sparsest bases.
#[derive(Debug, Clone)]
pub struct SparseBaseCensus {
    pub n: usize,
    pub field: FieldSpec,
    pub entries: Vec<CensusEntry>,
}

impl SparseBaseCensus {
    /// Number of rank-`k` matrices with an `s`-sparse row basis and an
    /// `s`-sparse column basis.
    pub fn count(&self, k: usize, s: usize) -> u128 {
        self.entries
            .iter()
            .filter(|e| e.rank == k && e.min_row_basis_sparsity <= s && e.min_col_basis_sparsity <= s)
            .count() as u128
    }
}

/// Enumerates all `q^(n^2)` matrices. Refuses when that exceeds `budget`.
pub fn sparse_base_census(n: usize, field: FieldSpec, budget: u128) -> Result<SparseBaseCensus, CodecError> {
    let q = field.order() as u128;
    let required = q.checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if required > budget {
        return Err(CodecError::BudgetExceeded { required, budget });
    }
    let mut entries = Vec::with_capacity(required as usize);
    for code in 0..required {
        let mut c = code;
        let m = Matrix::from_fn(n, n, field, |_, _| {
            let v = (c % q) as u32;
            c /= q;
            v
        });
        let rank = m.rank();
        let rows: Vec<Vec<u32>> = m.to_rows();
        let cols: Vec<Vec<u32>> = m.transpose().to_rows();
        entries.push(CensusEntry {
            rank,
            min_row_basis_sparsity: min_basis_sparsity(&rows, rank, field),
            min_col_basis_sparsity: min_basis_sparsity(&cols, rank, field),
        });
    }
    Ok(SparseBaseCensus { n, field, entries })
}

/// Smallest total nonzero count over all `k`-subsets of `vectors` that are
/// linearly independent.
fn min_basis_sparsity(vectors: &[Vec<u32>], k: usize, field: FieldSpec) -> usize {
    if k == 0 {
        return 0;
    }
    let n = vectors.len();
    let mut best = usize::MAX;
    for mask in 0u64..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let chosen: Vec<Vec<u32>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vectors[i].clone()).collect();
        let sparsity: usize = chosen.iter().map(|v| v.iter().filter(|&&x| x != 0).count()).sum();
        if sparsity >= best {
            continue;
        }
        if Matrix::from_rows(field, &chosen).map(|m| m.rank()).unwrap_or(0) == k {
            best = sparsity;
        }
    }
    best
}

/// Exact number of rank-`k` `n x n` matrices having `s`-sparse row and
/// column bases, by brute force.
pub fn count_rank_k_sparse_base_matrices(
    n: usize,
    k: usize,
    s: usize,
    field: FieldSpec,
    budget: u128,
) -> Result<u128, CodecError> {
    Ok(sparse_base_census(n, field, budget)?.count(k, s))
}

/// The counting bound `(n q)^(6s)`.
pub fn sparse_base_count_bound(n: usize, q: u32, s: usize) -> BigUint {
    BigUint::from(n as u64 * q as u64).pow(6 * s as u32)
}
