//! Dense matrices over a prime field.
//!
//! Entries are stored row-major as canonical `u32` representatives. Rank
//! over `F_2` goes through a bit-packed elimination; every other field uses
//! the generic path. Both are exposed so they can be cross-checked.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::field::{FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("rows have different lengths")]
    Ragged,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("order is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<u32>,
}

impl Matrix {
    /// All-zero matrix. Zero dimensions are allowed here so that degenerate
    /// submatrices can be represented.
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Matrix { rows, cols, field, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn ones(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Matrix { rows, cols, field, data: vec![1; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, field: FieldSpec, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let q = field.order();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % q);
            }
        }
        Matrix { rows, cols, field, data }
    }

    /// Builds a matrix from explicit rows of canonical values.
    pub fn from_rows(field: FieldSpec, rows: &[Vec<u32>]) -> Result<Self, MatrixError> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(MatrixError::Empty);
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(MatrixError::Ragged);
            }
            for &v in row {
                field.elem(v)?;
                data.push(v);
            }
        }
        Ok(Matrix { rows: r, cols: c, field, data })
    }

    /// Uniformly random entries.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, field: FieldSpec, rng: &mut R) -> Self {
        let q = field.order();
        Self::from_fn(rows, cols, field, |_, _| rng.gen_range(0..q))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        self.data[i * self.cols + j]
    }

    /// Sets an entry; the value is reduced into the field.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        self.data[i * self.cols + j] = v % self.field.order();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.field, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch(self.field.order(), other.field.order()).into());
        }
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                got: format!("{} rows", other.rows),
            });
        }
        let f = self.field;
        let mut out = Matrix::zeros(self.rows, other.cols, f);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(t, j)));
                }
            }
        }
        Ok(out)
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("vector of length {}", self.cols),
                got: format!("length {}", x.len()),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.field, self.row(i), x)).collect())
    }

    /// Number of nonzero entries.
    pub fn sparsity(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    /// Nonzeros in row `i` plus nonzeros in column `i`; a nonzero diagonal
    /// entry counts twice.
    pub fn index_sparsity(&self, i: usize) -> Result<usize, MatrixError> {
        self.require_square()?;
        if i >= self.rows {
            return Err(MatrixError::IndexOutOfRange { index: i, dim: self.rows });
        }
        let in_row = self.row(i).iter().filter(|&&v| v != 0).count();
        let in_col = (0..self.rows).filter(|&r| self.get(r, i) != 0).count();
        Ok(in_row + in_col)
    }

    pub fn rank(&self) -> usize {
        if self.field.is_binary() {
            rank_f2_packed(self)
        } else {
            self.rank_generic()
        }
    }

    /// Rank by Gaussian elimination with first-nonzero pivoting, for any field.
    pub fn rank_generic(&self) -> usize {
        let mut work = self.data.clone();
        eliminate(self.field, &mut work, self.rows, self.cols, self.cols).len()
    }

    /// Finds some `x` with `self * x = b`, or `None` when the system is
    /// inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, MatrixError> {
        if b.len() != self.rows {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("right-hand side of length {}", self.rows),
                got: format!("length {}", b.len()),
            });
        }
        let width = self.cols + 1;
        let mut aug = Vec::with_capacity(self.rows * width);
        for i in 0..self.rows {
            aug.extend_from_slice(self.row(i));
            aug.push(b[i] % self.field.order());
        }
        let pivots = eliminate(self.field, &mut aug, self.rows, width, self.cols);
        // Rows past the pivot rows are zero on the left; a nonzero right-hand
        // side there means no solution.
        for r in pivots.len()..self.rows {
            if aug[r * width + self.cols] != 0 {
                return Ok(None);
            }
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[r * width + self.cols];
        }
        Ok(Some(x))
    }

    /// Scans columns in `order` and keeps each one that is independent of
    /// the columns kept so far. Returns the kept column indices in scan order.
    pub fn greedy_column_basis(&self, order: &[usize]) -> Result<Vec<usize>, MatrixError> {
        check_permutation(order, self.cols)?;
        let mut span = SpanTracker::new(self.field, self.rows);
        let mut kept = Vec::new();
        for &j in order {
            if span.insert(&self.col(j)) {
                kept.push(j);
            }
        }
        Ok(kept)
    }

    /// Row analogue of [`Matrix::greedy_column_basis`].
    pub fn greedy_row_basis(&self, order: &[usize]) -> Result<Vec<usize>, MatrixError> {
        check_permutation(order, self.rows)?;
        let mut span = SpanTracker::new(self.field, self.cols);
        let mut kept = Vec::new();
        for &i in order {
            if span.insert(self.row(i)) {
                kept.push(i);
            }
        }
        Ok(kept)
    }

    /// Restriction to the given rows and columns (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Matrix, MatrixError> {
        for &i in rows {
            if i >= self.rows {
                return Err(MatrixError::IndexOutOfRange { index: i, dim: self.rows });
            }
        }
        for &j in cols {
            if j >= self.cols {
                return Err(MatrixError::IndexOutOfRange { index: j, dim: self.cols });
            }
        }
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        Ok(Matrix { rows: rows.len(), cols: cols.len(), field: self.field, data })
    }

    /// Principal submatrix on `indices`. An empty index set yields the 0x0
    /// matrix.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<Matrix, MatrixError> {
        self.require_square()?;
        self.submatrix(indices, indices)
    }

    pub(crate) fn require_square(&self) -> Result<(), MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

pub(crate) fn dot(field: FieldSpec, a: &[u32], b: &[u32]) -> u32 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

fn check_permutation(order: &[usize], n: usize) -> Result<(), MatrixError> {
    if order.len() != n {
        return Err(MatrixError::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(MatrixError::NotAPermutation(n));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Reduces `data` (row-major, `rows x width`) to reduced row echelon form,
/// pivoting only within the first `pivot_cols` columns. Returns the pivot
/// column of each leading row.
fn eliminate(field: FieldSpec, data: &mut [u32], rows: usize, width: usize, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| data[i * width + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..width {
                data.swap(p * width + j, r * width + j);
            }
        }
        let inv = field.inv(data[r * width + c]).expect("pivot is nonzero");
        for j in c..width {
            data[r * width + j] = field.mul(data[r * width + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = data[i * width + c];
            if factor == 0 {
                continue;
            }
            for j in c..width {
                let sub = field.mul(factor, data[r * width + j]);
                data[i * width + j] = field.sub(data[i * width + j], sub);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a row-major buffer; the buffer is destroyed.
pub(crate) fn rank_buffer(field: FieldSpec, data: &mut [u32], rows: usize, cols: usize) -> usize {
    eliminate(field, data, rows, cols, cols).len()
}

/// Bit-packed rank over `F_2`.
fn rank_f2_packed(m: &Matrix) -> usize {
    let words = m.cols.div_ceil(64);
    let mut rows: Vec<u64> = vec![0; m.rows * words];
    for i in 0..m.rows {
        for (j, &v) in m.row(i).iter().enumerate() {
            if v & 1 == 1 {
                rows[i * words + j / 64] |= 1u64 << (j % 64);
            }
        }
    }
    rank_f2_words(&mut rows, m.rows, words)
}

/// Rank of a bit-packed `F_2` matrix with `words` 64-bit words per row.
/// The buffer is destroyed.
pub(crate) fn rank_f2_words(rows: &mut [u64], nrows: usize, words: usize) -> usize {
    let mut rank = 0;
    for w in 0..words {
        for bit in 0..64 {
            if rank == nrows {
                return rank;
            }
            let mask = 1u64 << bit;
            let Some(p) = (rank..nrows).find(|&i| rows[i * words + w] & mask != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..words {
                    rows.swap(p * words + k, rank * words + k);
                }
            }
            for i in rank + 1..nrows {
                if rows[i * words + w] & mask != 0 {
                    for k in w..words {
                        rows[i * words + k] ^= rows[rank * words + k];
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Rank of an `F_2` matrix with at most 64 columns, one `u64` per row.
pub(crate) fn rank_f2_small(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let v = rows[i];
        if v == 0 {
            continue;
        }
        let low = v & v.wrapping_neg();
        for r in rows.iter_mut().skip(i + 1) {
            if *r & low != 0 {
                *r ^= v;
            }
        }
        rank += 1;
    }
    rank
}

/// Incrementally tracks the span of a set of vectors.
#[derive(Debug, Clone)]
pub struct SpanTracker {
    field: FieldSpec,
    dim: usize,
    // Each stored vector is normalized to 1 at its pivot and is zero at the
    // pivots of all earlier vectors.
    basis: Vec<(usize, Vec<u32>)>,
}

impl SpanTracker {
    pub fn new(field: FieldSpec, dim: usize) -> Self {
        SpanTracker { field, dim, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn reduce(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.dim, "vector length");
        let f = self.field;
        let mut w = v.to_vec();
        for (p, b) in &self.basis {
            let c = w[*p];
            if c != 0 {
                for (x, &y) in w.iter_mut().zip(b) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is outside the current span; returns whether it was added.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(w[p]).expect("nonzero pivot");
        for x in w.iter_mut() {
            *x = self.field.mul(*x, inv);
        }
        self.basis.push((p, w));
        true
    }
}
