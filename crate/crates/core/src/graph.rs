//! Directed graphs without self-loops.
//!
//! Arcs are stored as one adjacency bit-row per vertex. Random graphs are
//! drawn from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`): the
//! ordered pairs `(u, v)`, `u != v`, are visited row-major and each one
//! consumes exactly one `next_u64()` draw `x`; the arc is kept iff
//! `x < p * 2^64` (so `p = 1` keeps everything). That procedure is the
//! reproducibility contract for sampled graphs.

use std::fmt;
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("arc ({u}, {v}) has an endpoint outside 0..{n}")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("arc probability {0} is not in [0, 1]")]
    InvalidProbability(f64),
    #[error("out-degree {d} impossible on {n} vertices")]
    InvalidDegree { d: usize, n: usize },
    #[error("shift {shift} out of range for {n} vertices")]
    InvalidShift { shift: usize, n: usize },
    #[error("edge list parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl DiGraph {
    /// Graph on `n` vertices with no arcs.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let words = n.div_ceil(64);
        Ok(DiGraph { n, words, adj: vec![0; n * words] })
    }

    /// Every ordered pair of distinct vertices is an arc.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Ok(Self::empty(n)?.complement())
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    /// Builds a graph from an `n x n` bitmask (bit `v` of `rows[u]` is arc
    /// `(u, v)`), for `n <= 64`.
    pub fn from_bitmask_rows(rows: &[u64]) -> Result<Self, GraphError> {
        let n = rows.len();
        assert!(n <= 64, "bitmask rows support at most 64 vertices");
        let mut g = Self::empty(n)?;
        for (u, &r) in rows.iter().enumerate() {
            if r >> u & 1 == 1 {
                return Err(GraphError::SelfLoop(u));
            }
            if n < 64 && r >> n != 0 {
                return Err(GraphError::OutOfRange { u, v: 63 - r.leading_zeros() as usize, n });
            }
            g.adj[u] = r;
        }
        Ok(g)
    }

    /// Each of the `n(n-1)` ordered pairs is an arc independently with
    /// probability `p`.
    pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Self, GraphError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidProbability(p));
        }
        let mut g = Self::empty(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let threshold = (p * 2f64.powi(64)) as u128;
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                if (rng.next_u64() as u128) < threshold {
                    g.set_bit(u, v);
                }
            }
        }
        Ok(g)
    }

    /// Each vertex gets exactly `d` distinct out-neighbours chosen uniformly
    /// among the other vertices (partial Fisher-Yates on ChaCha8 draws).
    pub fn sample_out_regular(n: usize, d: usize, seed: u64) -> Result<Self, GraphError> {
        if d >= n.max(1) {
            return Err(GraphError::InvalidDegree { d, n });
        }
        let mut g = Self::empty(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for u in 0..n {
            let mut others: Vec<usize> = (0..n).filter(|&v| v != u).collect();
            for t in 0..d {
                let span = (others.len() - t) as u64;
                let pick = t + (rng.next_u64() % span) as usize;
                others.swap(t, pick);
                g.set_bit(u, others[t]);
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize) {
        self.adj[u * self.words + v / 64] |= 1u64 << (v % 64);
    }

    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n || v >= self.n {
            return Err(GraphError::OutOfRange { u, v, n: self.n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.set_bit(u, v);
        Ok(())
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) {
        if u < self.n && v < self.n {
            self.adj[u * self.words + v / 64] &= !(1u64 << (v % 64));
        }
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.row_words(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.n).map(|u| self.out_degree(u)).max().unwrap_or(0)
    }

    pub(crate) fn row_words(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    /// Out-neighbours of `u` in increasing order. For a knowledge graph these
    /// are the indices receiver `u` already holds.
    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(u).iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// All arcs in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).map(move |v| (u, v)))
    }

    /// Arc set of all non-loop ordered pairs not in `self`.
    pub fn complement(&self) -> DiGraph {
        let mut g = self.clone();
        for u in 0..self.n {
            for w in 0..self.words {
                let valid = if w + 1 == self.words && !self.n.is_multiple_of(64) {
                    (1u64 << (self.n % 64)) - 1
                } else {
                    u64::MAX
                };
                g.adj[u * self.words + w] = !self.adj[u * self.words + w] & valid;
            }
            g.remove_arc(u, u);
        }
        g
    }

    /// Maps each arc `(u, v)` to `(u, (v + i) mod n)`. Arcs that would land
    /// on `(u, u)` are dropped; their number is returned alongside.
    pub fn shift(&self, i: usize) -> Result<(DiGraph, usize), GraphError> {
        if i >= self.n {
            return Err(GraphError::InvalidShift { shift: i, n: self.n });
        }
        let mut g = Self::empty(self.n)?;
        let mut dropped = 0;
        for (u, v) in self.arcs() {
            let w = (v + i) % self.n;
            if w == u {
                dropped += 1;
            } else {
                g.set_bit(u, w);
            }
        }
        Ok((g, dropped))
    }

    /// Symmetric closure: `(u, v)` present iff `(u, v)` or `(v, u)` is.
    pub fn underlying_undirected(&self) -> DiGraph {
        let mut g = self.clone();
        for (u, v) in self.arcs() {
            g.set_bit(v, u);
        }
        g
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v)| self.has_arc(v, u))
    }

    /// Whether `m` represents this graph: nonzero diagonal, and zero at
    /// every non-arc off the diagonal.
    pub fn is_represented_by(&self, m: &Matrix) -> Result<bool, GraphError> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(MatrixError::DimensionMismatch {
                expected: format!("{0}x{0}", self.n),
                got: format!("{}x{}", m.rows(), m.cols()),
            }
            .into());
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let v = m.get(i, j);
                if i == j {
                    if v == 0 {
                        return Ok(false);
                    }
                } else if v != 0 && !self.has_arc(i, j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Edge-list text: `n m` on the first line, then one `u v` line per arc
    /// in row-major order, LF-terminated.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.arc_count());
        for (u, v) in self.arcs() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
        let (n, m) = parse_pair(header, hl + 1)?;
        let mut g = Self::empty(n).map_err(|e| GraphError::Parse { line: hl + 1, msg: e.to_string() })?;
        let mut seen = 0;
        for (ln, line) in lines {
            let (u, v) = parse_pair(line, ln + 1)?;
            g.add_arc(u, v).map_err(|e| GraphError::Parse { line: ln + 1, msg: e.to_string() })?;
            seen += 1;
        }
        if seen != m {
            return Err(GraphError::Parse { line: hl + 1, msg: format!("header declares {m} arcs, found {seen}") });
        }
        Ok(g)
    }
}

/// Free-function form of [`DiGraph::is_represented_by`].
pub fn is_representing(m: &Matrix, g: &DiGraph) -> Result<bool, GraphError> {
    g.is_represented_by(m)
}

fn parse_pair(line: &str, ln: usize) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        it.next()
            .ok_or_else(|| GraphError::Parse { line: ln, msg: "expected two integers".into() })?
            .parse()
            .map_err(|e| GraphError::Parse { line: ln, msg: format!("{e}") })
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(GraphError::Parse { line: ln, msg: "trailing tokens".into() });
    }
    Ok(pair)
}

impl fmt::Debug for DiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiGraph(n={}, arcs={:?})", self.n, self.arcs().collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn arcs(g: &DiGraph) -> Vec<(usize, usize)> {
        g.arcs().collect()
    }

    #[test]
    fn sampling_extremes_and_reproducibility() {
        assert_eq!(DiGraph::sample_gnp(7, 0.0, 1).unwrap().arc_count(), 0);
        assert_eq!(DiGraph::sample_gnp(7, 1.0, 1).unwrap().arc_count(), 42);
        assert_eq!(DiGraph::sample_gnp(70, 0.3, 9).unwrap(), DiGraph::sample_gnp(70, 0.3, 9).unwrap());
        assert_ne!(DiGraph::sample_gnp(70, 0.3, 9).unwrap(), DiGraph::sample_gnp(70, 0.3, 10).unwrap());
        assert!(matches!(DiGraph::sample_gnp(3, 1.5, 0), Err(GraphError::InvalidProbability(_))));
        assert!(matches!(DiGraph::sample_gnp(3, f64::NAN, 0), Err(GraphError::InvalidProbability(_))));
        assert_eq!(DiGraph::sample_gnp(0, 0.5, 0), Err(GraphError::NoVertices));
    }

    #[test]
    fn sampling_concentrates() {
        let n = 1000usize;
        let pairs = (n * (n - 1)) as f64;
        for seed in [1, 2, 3] {
            let m = DiGraph::sample_gnp(n, 0.5, seed).unwrap().arc_count() as f64;
            let sd = (pairs / 4.0).sqrt();
            assert!((m - pairs / 2.0).abs() <= 5.0 * sd, "seed {seed}: {m}");
        }
    }

    #[test]
    fn out_regular_degrees() {
        let g = DiGraph::sample_out_regular(24, 3, 5).unwrap();
        assert!((0..24).all(|u| g.out_degree(u) == 3));
        assert!(DiGraph::sample_out_regular(3, 3, 0).is_err());
    }

    #[test]
    fn complement_examples() {
        let e = DiGraph::empty(3).unwrap();
        assert_eq!(e.complement().arc_count(), 6);
        assert_eq!(DiGraph::complete(5).unwrap().complement().arc_count(), 0);
        for (n, seed) in [(5, 1), (64, 2), (65, 3), (130, 4)] {
            let g = DiGraph::sample_gnp(n, 0.4, seed).unwrap();
            let c = g.complement();
            assert_eq!(c.complement(), g);
            assert_eq!(g.arc_count() + c.arc_count(), n * (n - 1));
            assert!((0..n).all(|u| !c.has_arc(u, u)));
        }
    }

    #[test]
    fn shift_examples() {
        let g = DiGraph::sample_gnp(9, 0.5, 4).unwrap();
        assert_eq!(g.shift(0).unwrap(), (g.clone(), 0));
        let g = DiGraph::from_arcs(3, [(0, 1)]).unwrap();
        assert_eq!(arcs(&g.shift(1).unwrap().0), vec![(0, 2)]);
        let g = DiGraph::from_arcs(2, [(0, 1)]).unwrap();
        let (s, dropped) = g.shift(1).unwrap();
        assert_eq!((s.arc_count(), dropped), (0, 1));
        assert!(g.shift(2).is_err());
    }

    #[test]
    fn shifts_compose_without_loops() {
        // arcs (u, u+1) with n = 10; shifting by i + j < 9 never hits a loop
        let n = 10;
        let g = DiGraph::from_arcs(n, (0..n).map(|u| (u, (u + 1) % n))).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let (a, d1) = g.shift(i).unwrap();
                let (b, d2) = a.shift(j).unwrap();
                let (c, d3) = g.shift((i + j) % n).unwrap();
                assert_eq!((d1, d2, d3), (0, 0, 0));
                assert_eq!(b, c);
            }
        }
    }

    #[test]
    fn representing_predicate() {
        let f = FieldSpec::new(3).unwrap();
        let g = DiGraph::sample_gnp(6, 0.5, 2).unwrap();
        assert!(g.is_represented_by(&Matrix::identity(6, f)).unwrap());
        assert!(!g.is_represented_by(&Matrix::zeros(6, 6, f)).unwrap());
        let k = DiGraph::complete(6).unwrap();
        assert!(k.is_represented_by(&Matrix::ones(6, 6, f)).unwrap());
        let mut m = Matrix::identity(6, f);
        m.set(0, 1, 2);
        assert_eq!(g.is_represented_by(&m).unwrap(), g.has_arc(0, 1));
        assert!(g.is_represented_by(&Matrix::identity(5, f)).is_err());
    }

    #[test]
    fn undirected_and_degree() {
        let g = DiGraph::from_arcs(3, [(0, 1)]).unwrap();
        assert_eq!(arcs(&g.underlying_undirected()), vec![(0, 1), (1, 0)]);
        let s = g.underlying_undirected();
        assert_eq!(s.underlying_undirected(), s);
        let k = DiGraph::complete(4).unwrap();
        assert_eq!(k.underlying_undirected(), k);
        assert_eq!(DiGraph::empty(4).unwrap().max_out_degree(), 0);
        assert_eq!(k.max_out_degree(), 3);
        assert_eq!(DiGraph::from_arcs(3, [(0, 1), (0, 2)]).unwrap().max_out_degree(), 2);
    }

    #[test]
    fn arc_validation() {
        assert_eq!(DiGraph::from_arcs(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(matches!(DiGraph::from_arcs(3, [(0, 3)]), Err(GraphError::OutOfRange { .. })));
        assert_eq!(DiGraph::from_bitmask_rows(&[0b1]), Err(GraphError::SelfLoop(0)));
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = DiGraph::sample_gnp(12, 0.3, 8).unwrap();
        let text = g.to_edge_list();
        assert!(text.ends_with('\n'));
        assert_eq!(DiGraph::parse_edge_list(&text).unwrap(), g);
        assert_eq!(DiGraph::from_arcs(3, [(2, 0), (0, 1)]).unwrap().to_edge_list(), "3 2\n0 1\n2 0\n");
        assert!(DiGraph::parse_edge_list("3 1\n0 0\n").is_err());
        assert!(DiGraph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(DiGraph::parse_edge_list("3 1\n0 x\n").is_err());
        assert!(DiGraph::parse_edge_list("").is_err());
    }
}
