//! Minrank solvers and certificates.
//!
//! * [`exact_minrank`] enumerates every representing matrix (budget-gated).
//! * [`sparsity_lower_bound`]: a representing matrix has at most `n + |A|`
//!   nonzeros, and a nonzero-diagonal matrix of rank `r` has at least
//!   `n^2 / (4r)` of them.
//! * [`independent_set_lower_bound`]: an independent set induces a diagonal
//!   principal submatrix in every representing matrix.
//! * [`clique_cover_upper_bound`]: a partition into bidirectional cliques is
//!   a proper colouring of the complement, and the block matrix of ones on
//!   each class represents the graph with rank equal to the class count.
//! * [`sparse_basis_submatrix`] finds a principal submatrix of no larger
//!   relative rank that has row and column bases of sparsity at most
//!   `2 s(M') k'/n'`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::FieldSpec;
use crate::graph::{DiGraph, GraphError};
use crate::matrix::{rank_buffer, rank_f2_small, Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("exact search needs {required} enumerations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("time limit reached")]
    Timeout,
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Default cap on the number of matrices [`exact_minrank`] may enumerate.
pub const DEFAULT_EXACT_BUDGET: u128 = 1 << 24;
/// Largest `n` for which the independent set is computed exactly by default.
pub const DEFAULT_INDSET_EXACT_LIMIT: usize = 40;
/// Largest `n` for which the clique cover is computed exactly by default.
pub const DEFAULT_COVER_EXACT_LIMIT: usize = 20;
/// Exact independent-set search works on 128-bit vertex masks.
pub const MAX_EXACT_SEARCH_VERTICES: usize = 128;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub budget: u128,
    /// Fix every diagonal entry to 1. Row scaling preserves rank, so this
    /// does not change the minimum; it is off by default for `q > 2`.
    pub pin_diagonal: bool,
    pub deadline: Option<Instant>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { budget: DEFAULT_EXACT_BUDGET, pin_diagonal: false, deadline: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMinrank {
    pub rank: usize,
    /// First representing matrix (in enumeration order) attaining `rank`.
    pub witness: Matrix,
}

/// Number of representing matrices [`exact_minrank`] would enumerate.
pub fn exact_search_size(g: &DiGraph, field: FieldSpec, pin_diagonal: bool) -> u128 {
    let q = field.order() as u128;
    let arcs = q.checked_pow(g.arc_count() as u32).unwrap_or(u128::MAX);
    let diag = if pin_diagonal || q == 2 { 1 } else { (q - 1).checked_pow(g.n() as u32).unwrap_or(u128::MAX) };
    arcs.saturating_mul(diag)
}

/// Minimum rank over all matrices representing `g`.
///
/// Enumeration index `t` is read as mixed-radix digits: first one digit in
/// `0..q` per arc (row-major arc order), then one digit in `1..q` per
/// diagonal entry unless the diagonal is pinned. The search stops early
/// once the exact independence number is reached. The witness is the
/// smallest index attaining the minimum, independent of thread scheduling.
pub fn exact_minrank(g: &DiGraph, field: FieldSpec, opts: ExactOptions) -> Result<ExactMinrank, BoundsError> {
    let pin = opts.pin_diagonal || field.is_binary();
    let required = exact_search_size(g, field, pin);
    if required > opts.budget || required > u64::MAX as u128 {
        return Err(BoundsError::BudgetExceeded { required, budget: opts.budget });
    }
    let total = required as u64;
    let n = g.n();
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    let floor =
        if n <= MAX_EXACT_SEARCH_VERTICES { max_independent_set(g, None).map(|s| s.len()).unwrap_or(1) } else { 1 }
            .max(1);

    let space = Assignment { n, field, arcs: &arcs, pin };
    let hit = AtomicU64::new(u64::MAX);
    let timed_out = AtomicBool::new(false);
    let chunks = total.div_ceil(CHUNK);

    let scan = |c: u64| -> Option<(usize, u64)> {
        let start = c * CHUNK;
        if start > hit.load(Ordering::Relaxed) {
            return None;
        }
        if let Some(d) = opts.deadline {
            if Instant::now() >= d {
                timed_out.store(true, Ordering::Relaxed);
                return None;
            }
        }
        let end = (start + CHUNK).min(total);
        let mut best: Option<(usize, u64)> = None;
        let mut scratch = Scratch::new(n);
        for t in start..end {
            let r = space.rank_at(t, &mut scratch);
            if best.is_none_or(|(b, _)| r < b) {
                best = Some((r, t));
            }
            if r <= floor {
                hit.fetch_min(t, Ordering::Relaxed);
                break;
            }
        }
        best
    };

    let best = if chunks > 4 {
        (0..chunks).into_par_iter().filter_map(scan).min()
    } else {
        (0..chunks).filter_map(scan).min()
    };
    if timed_out.load(Ordering::Relaxed) {
        return Err(BoundsError::Timeout);
    }
    let (rank, index) = best.expect("search space is never empty");
    Ok(ExactMinrank { rank, witness: space.matrix_at(index) })
}

struct Assignment<'a> {
    n: usize,
    field: FieldSpec,
    arcs: &'a [(usize, usize)],
    pin: bool,
}

struct Scratch {
    bits: Vec<u64>,
    dense: Vec<u32>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { bits: vec![0; n], dense: vec![0; n * n] }
    }
}

impl Assignment<'_> {
    fn fill_dense(&self, mut t: u64, out: &mut [u32]) {
        let q = self.field.order() as u64;
        let n = self.n;
        out.fill(0);
        for &(u, v) in self.arcs {
            out[u * n + v] = (t % q) as u32;
            t /= q;
        }
        for i in 0..n {
            out[i * n + i] = if self.pin {
                1
            } else {
                let d = (t % (q - 1)) as u32 + 1;
                t /= q - 1;
                d
            };
        }
    }

    fn rank_at(&self, t: u64, scratch: &mut Scratch) -> usize {
        if self.field.is_binary() && self.n <= 64 {
            for (i, row) in scratch.bits.iter_mut().enumerate() {
                *row = 1 << i;
            }
            for (b, &(u, v)) in self.arcs.iter().enumerate() {
                if t >> b & 1 == 1 {
                    scratch.bits[u] |= 1 << v;
                }
            }
            rank_f2_small(&mut scratch.bits)
        } else {
            self.fill_dense(t, &mut scratch.dense);
            rank_buffer(self.field, &mut scratch.dense, self.n, self.n)
        }
    }

    fn matrix_at(&self, t: u64) -> Matrix {
        let mut data = vec![0; self.n * self.n];
        self.fill_dense(t, &mut data);
        Matrix::from_fn(self.n, self.n, self.field, |i, j| data[i * self.n + j])
    }
}

/// `ceil(n^2 / (4 (n + |A|)))`, at least 1.
pub fn sparsity_lower_bound(g: &DiGraph) -> usize {
    let n = g.n();
    let denom = 4 * (n + g.arc_count());
    (n * n).div_ceil(denom).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Greedy,
    /// Exact search was cut off; the result is the best found so far.
    Timeout,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependentSet {
    pub vertices: Vec<usize>,
    pub method: Method,
}

impl IndependentSet {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// An independent set of `underlying_undirected(g)`: exact when
/// `n <= exact_limit`, otherwise the minimum-degree greedy heuristic.
pub fn independent_set_lower_bound(g: &DiGraph, exact_limit: usize) -> IndependentSet {
    independent_set_with_deadline(g, exact_limit, None)
}

pub fn independent_set_with_deadline(g: &DiGraph, exact_limit: usize, deadline: Option<Instant>) -> IndependentSet {
    if g.n() <= exact_limit.min(MAX_EXACT_SEARCH_VERTICES) {
        match max_independent_set(g, deadline) {
            Ok(v) => IndependentSet { vertices: v, method: Method::Exact },
            Err(partial) => IndependentSet { vertices: partial, method: Method::Timeout },
        }
    } else {
        IndependentSet { vertices: greedy_independent_set(g), method: Method::Greedy }
    }
}

fn masks_u128(h: &DiGraph) -> Vec<u128> {
    (0..h.n()).map(|u| h.out_neighbors(u).fold(0u128, |m, v| m | 1 << v)).collect()
}

/// Maximum independent set by branch and bound, `n <= 128`. On timeout
/// returns `Err` with the best set found so far.
pub fn max_independent_set(g: &DiGraph, deadline: Option<Instant>) -> Result<Vec<usize>, Vec<usize>> {
    assert!(g.n() <= MAX_EXACT_SEARCH_VERTICES);
    let adj = masks_u128(&g.underlying_undirected());
    let all = if g.n() == 128 { u128::MAX } else { (1u128 << g.n()) - 1 };
    let mut search = MisSearch { adj, best: greedy_independent_set(g), nodes: 0, deadline, expired: false };
    let mut cur = Vec::new();
    search.run(all, &mut cur);
    let mut best = search.best;
    best.sort_unstable();
    if search.expired {
        Err(best)
    } else {
        Ok(best)
    }
}

struct MisSearch {
    adj: Vec<u128>,
    best: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    expired: bool,
}

impl MisSearch {
    fn run(&mut self, mut cand: u128, cur: &mut Vec<usize>) {
        self.nodes += 1;
        if self.expired || (self.nodes.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d)) {
            self.expired = true;
            return;
        }
        let depth = cur.len();
        // Vertices of degree <= 1 within the candidates belong to some maximum set.
        loop {
            let mut forced = None;
            let mut bits = cand;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if (self.adj[v] & cand).count_ones() <= 1 {
                    forced = Some(v);
                    break;
                }
            }
            match forced {
                Some(v) => {
                    cur.push(v);
                    cand &= !(self.adj[v] | 1 << v);
                }
                None => break,
            }
        }
        if cand == 0 {
            if cur.len() > self.best.len() {
                self.best = cur.clone();
            }
        } else if cur.len() + (cand.count_ones() as usize) > self.best.len() {
            let mut pick = 0;
            let mut pick_deg = 0;
            let mut bits = cand;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let d = (self.adj[v] & cand).count_ones();
                if d > pick_deg {
                    pick = v;
                    pick_deg = d;
                }
            }
            cur.push(pick);
            self.run(cand & !(self.adj[pick] | 1 << pick), cur);
            cur.pop();
            self.run(cand & !(1 << pick), cur);
        }
        cur.truncate(depth);
    }
}

/// Repeatedly takes a minimum-degree vertex (lowest index on ties) of the
/// remaining undirected graph and deletes its closed neighbourhood.
pub fn greedy_independent_set(g: &DiGraph) -> Vec<usize> {
    let h = g.underlying_undirected();
    let n = h.n();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|u| h.out_neighbors(u).collect()).collect();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let mut chosen = Vec::new();
    while let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)) {
        chosen.push(v);
        let mut removed = vec![v];
        removed.extend(nbrs[v].iter().copied().filter(|&w| alive[w]));
        for &w in &removed {
            alive[w] = false;
        }
        for &w in &removed {
            for &x in &nbrs[w] {
                if alive[x] {
                    deg[x] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// A partition of the vertices into bidirectional cliques of `g`, given as
/// a proper colouring of `underlying_undirected(complement(g))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueCover {
    pub colors: Vec<usize>,
    pub num_colors: usize,
    pub method: Method,
}

impl CliqueCover {
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }

    /// `M[i][j] = 1` iff `i` and `j` share a colour. Represents `g` and has
    /// rank equal to the number of colours.
    pub fn witness(&self, field: FieldSpec) -> Matrix {
        let n = self.colors.len();
        Matrix::from_fn(n, n, field, |i, j| (self.colors[i] == self.colors[j]) as u32)
    }
}

pub fn clique_cover_upper_bound(g: &DiGraph, exact_limit: usize) -> CliqueCover {
    clique_cover_with_deadline(g, exact_limit, None)
}

pub fn clique_cover_with_deadline(g: &DiGraph, exact_limit: usize, deadline: Option<Instant>) -> CliqueCover {
    let h = g.complement().underlying_undirected();
    let greedy = greedy_coloring(&h);
    if h.n() > exact_limit.min(MAX_EXACT_SEARCH_VERTICES) {
        return cover_from(greedy, Method::Greedy);
    }
    match exact_coloring(&h, greedy, deadline) {
        Ok(c) => cover_from(c, Method::Exact),
        Err(c) => cover_from(c, Method::Timeout),
    }
}

fn cover_from(colors: Vec<usize>, method: Method) -> CliqueCover {
    let num_colors = colors.iter().max().map_or(0, |&c| c + 1);
    CliqueCover { colors, num_colors, method }
}

/// First-fit colouring in descending-degree order, index breaking ties.
pub fn greedy_coloring(h: &DiGraph) -> Vec<usize> {
    let n = h.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.out_degree(v)), v));
    let mut colors = vec![usize::MAX; n];
    let mut used = Vec::new();
    for v in order {
        used.clear();
        used.resize(n + 1, false);
        for w in h.out_neighbors(v) {
            if colors[w] != usize::MAX {
                used[colors[w]] = true;
            }
        }
        colors[v] = used.iter().position(|&u| !u).expect("n + 1 slots");
    }
    colors
}

/// Minimum colouring of a symmetric graph by DSATUR branch and bound,
/// seeded with `initial` as the incumbent. On timeout returns `Err` with the
/// best colouring found.
fn exact_coloring(h: &DiGraph, initial: Vec<usize>, deadline: Option<Instant>) -> Result<Vec<usize>, Vec<usize>> {
    let n = h.n();
    let adj = masks_u128(h);
    let best_k = initial.iter().max().map_or(0, |&c| c + 1);
    let mut s = ColorSearch {
        adj,
        n,
        colors: vec![usize::MAX; n],
        best: initial,
        best_k,
        floor: 1,
        nodes: 0,
        deadline,
        expired: false,
    };
    s.floor = greedy_clique_size(&s.adj, n);
    if s.best_k > s.floor {
        s.run(0, 0);
    }
    if s.expired {
        Err(s.best)
    } else {
        Ok(s.best)
    }
}

fn greedy_clique_size(adj: &[u128], n: usize) -> usize {
    let mut best = 1.min(n);
    for start in 0..n {
        let mut clique = 1;
        let mut cand = adj[start];
        while cand != 0 {
            // take the candidate with most neighbours among candidates
            let mut pick = 0;
            let mut pick_deg = -1i64;
            let mut bits = cand;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let d = (adj[v] & cand).count_ones() as i64;
                if d > pick_deg {
                    pick = v;
                    pick_deg = d;
                }
            }
            clique += 1;
            cand &= adj[pick];
        }
        best = best.max(clique);
    }
    best
}

struct ColorSearch {
    adj: Vec<u128>,
    n: usize,
    colors: Vec<usize>,
    best: Vec<usize>,
    best_k: usize,
    floor: usize,
    nodes: u64,
    deadline: Option<Instant>,
    expired: bool,
}

impl ColorSearch {
    fn run(&mut self, colored: usize, used: usize) {
        self.nodes += 1;
        if self.expired || (self.nodes.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d)) {
            self.expired = true;
            return;
        }
        if used >= self.best_k || self.best_k <= self.floor {
            return;
        }
        if colored == self.n {
            self.best = self.colors.clone();
            self.best_k = used;
            return;
        }
        // DSATUR: most distinct neighbour colours, then degree, then index.
        let mut pick = usize::MAX;
        let mut key = (0u32, 0u32);
        for v in 0..self.n {
            if self.colors[v] != usize::MAX {
                continue;
            }
            let mut seen = 0u128;
            let mut bits = self.adj[v];
            while bits != 0 {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if self.colors[w] != usize::MAX {
                    seen |= 1 << self.colors[w];
                }
            }
            let k = (seen.count_ones(), self.adj[v].count_ones());
            if pick == usize::MAX || k > key {
                pick = v;
                key = k;
            }
        }
        let mut forbidden = 0u128;
        let mut bits = self.adj[pick];
        while bits != 0 {
            let w = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if self.colors[w] != usize::MAX {
                forbidden |= 1 << self.colors[w];
            }
        }
        for c in 0..=used.min(self.n - 1) {
            if forbidden >> c & 1 == 1 {
                continue;
            }
            let next_used = if c == used { used + 1 } else { used };
            if next_used >= self.best_k {
                continue;
            }
            self.colors[pick] = c;
            self.run(colored + 1, next_used);
            self.colors[pick] = usize::MAX;
            if self.expired {
                return;
            }
        }
    }
}

/// Whether `colors` is a proper colouring of the symmetric graph `h`.
pub fn is_proper_coloring(h: &DiGraph, colors: &[usize]) -> bool {
    colors.len() == h.n() && h.arcs().all(|(u, v)| colors[u] != colors[v])
}

/// Whether `minrk(g) * minrk(complement(g)) >= n`, both computed exactly.
pub fn product_bound_holds(g: &DiGraph, field: FieldSpec, opts: ExactOptions) -> Result<bool, BoundsError> {
    let a = exact_minrank(g, field, opts)?.rank;
    let b = exact_minrank(&g.complement(), field, opts)?.rank;
    Ok(a * b >= g.n())
}

/// Result of [`sparse_basis_submatrix`]. Index lists refer to the original
/// matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparseBasisSubmatrix {
    /// Principal index set of `M'`, increasing.
    pub indices: Vec<usize>,
    /// `k' = rank(M')`.
    pub rank: usize,
    /// `n' = |indices|`.
    pub size: usize,
    pub row_basis: Vec<usize>,
    pub col_basis: Vec<usize>,
    /// `s(M')`.
    pub sparsity: usize,
    /// Nonzeros of `M'` inside the chosen rows.
    pub row_basis_sparsity: usize,
    /// Nonzeros of `M'` inside the chosen columns.
    pub col_basis_sparsity: usize,
    /// Number of times the search descended into a leading submatrix.
    pub depth: usize,
}

/// Finds a principal submatrix `M'` of `m` with `k'/n' <= k/n` and row and
/// column bases of sparsity at most `2 s(M') k'/n'`.
///
/// A zero diagonal entry gives the `1x1` zero submatrix immediately.
/// Otherwise, at each level the indices are sorted by `s(i)` (stable), and
/// the search descends into the first leading principal submatrix of size
/// `n' < n` whose rank is at most `n' k / n`. When there is none, the current
/// matrix is returned with greedy bases taken in the sorted order. Both
/// guarantees are checked before returning.
pub fn sparse_basis_submatrix(m: &Matrix) -> Result<SparseBasisSubmatrix, BoundsError> {
    m.require_square()?;
    let top_n = m.rows();
    if top_n == 0 {
        return Err(MatrixError::Empty.into());
    }
    if let Some(i) = (0..top_n).find(|&i| m.get(i, i) == 0) {
        return Ok(SparseBasisSubmatrix {
            indices: vec![i],
            rank: 0,
            size: 1,
            row_basis: Vec::new(),
            col_basis: Vec::new(),
            sparsity: 0,
            row_basis_sparsity: 0,
            col_basis_sparsity: 0,
            depth: 0,
        });
    }
    let top_k = m.rank();
    let mut current: Vec<usize> = (0..top_n).collect();
    let mut depth = 0;
    loop {
        let sub = m.principal_submatrix(&current)?;
        let size = current.len();
        let k = sub.rank();
        let order = sparsity_order(&sub)?;
        let mut descend = None;
        for lead in 1..size {
            let r = sub.principal_submatrix(&order[..lead])?.rank();
            if r * size <= k * lead {
                descend = Some(lead);
                break;
            }
        }
        if let Some(lead) = descend {
            let mut next: Vec<usize> = order[..lead].iter().map(|&i| current[i]).collect();
            next.sort_unstable();
            current = next;
            depth += 1;
            continue;
        }
        let cols = sub.greedy_column_basis(&order)?;
        let rows = sub.greedy_row_basis(&order)?;
        let col_sparsity: usize = cols.iter().map(|&j| sub.col(j).iter().filter(|&&x| x != 0).count()).sum();
        let row_sparsity: usize = rows.iter().map(|&i| sub.row(i).iter().filter(|&&x| x != 0).count()).sum();
        let result = SparseBasisSubmatrix {
            rank: k,
            size,
            sparsity: sub.sparsity(),
            row_basis: sorted(rows.iter().map(|&i| current[i])),
            col_basis: sorted(cols.iter().map(|&j| current[j])),
            indices: current,
            row_basis_sparsity: row_sparsity,
            col_basis_sparsity: col_sparsity,
            depth,
        };
        check_sparse_basis(&result, top_n, top_k)?;
        return Ok(result);
    }
}

fn sorted(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = it.collect();
    v.sort_unstable();
    v
}

/// Indices sorted by non-decreasing `s(i)`, ties by index.
fn sparsity_order(m: &Matrix) -> Result<Vec<usize>, MatrixError> {
    let s = (0..m.rows()).map(|i| m.index_sparsity(i)).collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by_key(|&i| s[i]);
    Ok(order)
}

fn check_sparse_basis(r: &SparseBasisSubmatrix, n: usize, k: usize) -> Result<(), BoundsError> {
    if r.rank * n > k * r.size {
        return Err(BoundsError::InvariantViolation(format!(
            "relative rank grew: k'={} n'={} vs k={k} n={n}",
            r.rank, r.size
        )));
    }
    if r.row_basis.len() != r.rank || r.col_basis.len() != r.rank {
        return Err(BoundsError::InvariantViolation("basis size differs from rank".into()));
    }
    for (name, s) in [("row", r.row_basis_sparsity), ("column", r.col_basis_sparsity)] {
        if s * r.size > 2 * r.sparsity * r.rank {
            return Err(BoundsError::InvariantViolation(format!(
                "{name} basis sparsity {s} exceeds 2*{}*{}/{}",
                r.sparsity, r.rank, r.size
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct BoundsOptions {
    pub indset_exact_limit: usize,
    pub cover_exact_limit: usize,
    /// Exact minrank is attempted only when its search fits this.
    pub exact: ExactOptions,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            indset_exact_limit: DEFAULT_INDSET_EXACT_LIMIT,
            cover_exact_limit: DEFAULT_COVER_EXACT_LIMIT,
            exact: ExactOptions::default(),
        }
    }
}

/// Every bound for one graph, with the witnesses that certify them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub arc_count: usize,
    pub field_order: u32,
    pub lower_sparsity: usize,
    pub lower_indset: usize,
    pub indset_method: Method,
    pub upper_clique_cover: usize,
    pub cover_method: Method,
    pub exact: Option<usize>,
    pub independent_set: Vec<usize>,
    pub coloring: Vec<usize>,
    /// The exact-search witness when available, else the clique-cover matrix.
    pub witness_matrix: Vec<Vec<u32>>,
    pub witness_rank: usize,
}

impl BoundsReport {
    pub fn compute(g: &DiGraph, field: FieldSpec, opts: BoundsOptions) -> Result<Self, BoundsError> {
        let indset = independent_set_with_deadline(g, opts.indset_exact_limit, opts.exact.deadline);
        let cover = clique_cover_with_deadline(g, opts.cover_exact_limit, opts.exact.deadline);
        let exact = match exact_minrank(g, field, opts.exact) {
            Ok(e) => Some(e),
            Err(BoundsError::BudgetExceeded { .. } | BoundsError::Timeout) => None,
            Err(e) => return Err(e),
        };
        let witness = match &exact {
            Some(e) => e.witness.clone(),
            None => cover.witness(field),
        };
        let report = BoundsReport {
            n: g.n(),
            arc_count: g.arc_count(),
            field_order: field.order(),
            lower_sparsity: sparsity_lower_bound(g),
            lower_indset: indset.size(),
            indset_method: indset.method,
            upper_clique_cover: cover.num_colors,
            cover_method: cover.method,
            exact: exact.map(|e| e.rank),
            independent_set: indset.vertices,
            coloring: cover.colors,
            witness_rank: witness.rank(),
            witness_matrix: witness.to_rows(),
        };
        report.verify(g, field)?;
        Ok(report)
    }

    /// Checks the ordering of the bounds and every witness.
    pub fn verify(&self, g: &DiGraph, field: FieldSpec) -> Result<(), BoundsError> {
        let fail = |m: String| Err(BoundsError::InvariantViolation(m));
        let lower = self.lower_sparsity.max(self.lower_indset);
        if let Some(x) = self.exact {
            if lower > x || x > self.upper_clique_cover {
                return fail(format!(
                    "bounds out of order: lower {lower}, exact {x}, upper {}",
                    self.upper_clique_cover
                ));
            }
        } else if self.lower_sparsity > self.upper_clique_cover || self.lower_indset > self.upper_clique_cover {
            return fail(format!("lower bound {lower} above upper bound {}", self.upper_clique_cover));
        }
        if self.independent_set.iter().any(|&u| self.independent_set.iter().any(|&v| g.has_arc(u, v))) {
            return fail("independent set contains an arc".into());
        }
        let h = g.complement().underlying_undirected();
        if !is_proper_coloring(&h, &self.coloring) {
            return fail("colouring is not proper on the complement".into());
        }
        let w = Matrix::from_rows(field, &self.witness_matrix)?;
        if !g.is_represented_by(&w)? {
            return fail("witness matrix does not represent the graph".into());
        }
        if w.rank() != self.witness_rank {
            return fail("witness rank mismatch".into());
        }
        if self.exact.is_some_and(|x| x != self.witness_rank) {
            return fail("exact witness does not attain the reported rank".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u32) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    fn cycle5() -> DiGraph {
        DiGraph::from_arcs(5, (0..5).flat_map(|i| [(i, (i + 1) % 5), ((i + 1) % 5, i)])).unwrap()
    }

    /// Independent oracle: minimum rank over all representing matrices,
    /// built entry by entry with the generic rank routine.
    fn minrank_oracle(g: &DiGraph, field: FieldSpec) -> usize {
        let arcs: Vec<(usize, usize)> = g.arcs().collect();
        let q = field.order() as usize;
        let n = g.n();
        let diag_choices = (q - 1).pow(n as u32);
        let mut best = usize::MAX;
        for a in 0..q.pow(arcs.len() as u32) {
            for d in 0..diag_choices {
                let mut m = Matrix::zeros(n, n, field);
                let mut t = a;
                for &(u, v) in &arcs {
                    m.set(u, v, (t % q) as u32);
                    t /= q;
                }
                let mut t = d;
                for i in 0..n {
                    m.set(i, i, (t % (q - 1)) as u32 + 1);
                    t /= q - 1;
                }
                best = best.min(m.rank_generic());
            }
        }
        best
    }

    #[test]
    fn exact_examples() {
        for n in 1..=5 {
            let k = DiGraph::complete(n).unwrap();
            let e = exact_minrank(&k, f(2), ExactOptions::default()).unwrap();
            assert_eq!(e.rank, 1);
            assert_eq!(e.witness, Matrix::ones(n, n, f(2)));
        }
        let e = exact_minrank(&DiGraph::empty(4).unwrap(), f(2), ExactOptions::default()).unwrap();
        assert_eq!(e.rank, 4);
        assert_eq!(e.witness, Matrix::identity(4, f(2)));
        let c5 = cycle5();
        assert_eq!(minrank_oracle(&c5, f(2)), 3);
        let e = exact_minrank(&c5, f(2), ExactOptions::default()).unwrap();
        assert_eq!(e.rank, 3);
        assert!(c5.is_represented_by(&e.witness).unwrap());
        assert_eq!(e.witness.rank(), 3);
    }

    #[test]
    fn exact_matches_oracle_over_f3() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = rng.gen_range(1..=4);
            let g = DiGraph::sample_gnp(n, 0.35, rng.gen()).unwrap();
            if g.arc_count() > 6 {
                continue;
            }
            let field = f(3);
            let e = exact_minrank(&g, field, ExactOptions::default()).unwrap();
            assert_eq!(e.rank, minrank_oracle(&g, field), "{g:?}");
            assert!(g.is_represented_by(&e.witness).unwrap());
            assert_eq!(e.witness.rank(), e.rank);
            let pinned = exact_minrank(&g, field, ExactOptions { pin_diagonal: true, ..Default::default() }).unwrap();
            assert_eq!(pinned.rank, e.rank);
        }
    }

    #[test]
    fn exact_is_deterministic_under_parallel_chunks() {
        // 2^18 assignments, so the search spreads over many chunks
        let g = DiGraph::sample_gnp(7, 0.45, 3).unwrap();
        let g = DiGraph::from_arcs(7, g.arcs().take(18)).unwrap();
        let a = exact_minrank(&g, f(2), ExactOptions::default()).unwrap();
        for _ in 0..5 {
            assert_eq!(exact_minrank(&g, f(2), ExactOptions::default()).unwrap(), a);
        }
    }

    #[test]
    fn exact_refuses_over_budget() {
        let g = DiGraph::complete(6).unwrap();
        let err = exact_minrank(&g, f(2), ExactOptions::default()).unwrap_err();
        assert_eq!(err, BoundsError::BudgetExceeded { required: 1 << 30, budget: DEFAULT_EXACT_BUDGET });
        let g = DiGraph::empty(3).unwrap();
        assert_eq!(exact_search_size(&g, f(5), false), 64);
        assert_eq!(exact_search_size(&g, f(5), true), 1);
    }

    #[test]
    fn exact_respects_deadline() {
        let opts = ExactOptions { deadline: Some(Instant::now()), ..Default::default() };
        assert_eq!(exact_minrank(&cycle5(), f(2), opts), Err(BoundsError::Timeout));
    }

    #[test]
    fn sparsity_bound_examples() {
        assert_eq!(sparsity_lower_bound(&DiGraph::empty(10).unwrap()), 3);
        assert_eq!(sparsity_lower_bound(&DiGraph::complete(10).unwrap()), 1);
        let n = 2000;
        let g = DiGraph::sample_gnp(n, 4.0 / n as f64, 17).unwrap();
        let expected = (n * n).div_ceil(4 * (n + g.arc_count()));
        assert_eq!(sparsity_lower_bound(&g), expected);
        assert!((80..=120).contains(&expected), "{expected}");
    }

    #[test]
    fn independent_set_examples() {
        let e = independent_set_lower_bound(&DiGraph::empty(7).unwrap(), 40);
        assert_eq!((e.size(), e.method), (7, Method::Exact));
        assert_eq!(independent_set_lower_bound(&DiGraph::complete(5).unwrap(), 40).size(), 1);
        assert_eq!(independent_set_lower_bound(&cycle5(), 40).size(), 2);
        let g = independent_set_lower_bound(&cycle5(), 3);
        assert_eq!((g.size(), g.method), (2, Method::Greedy));
    }

    /// Subset enumeration oracle for the independence number.
    fn alpha_oracle(g: &DiGraph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .filter(|&s| (0..n).all(|u| (0..n).all(|v| s >> u & 1 == 0 || s >> v & 1 == 0 || !g.has_arc(u, v))))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn exact_independent_set_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..60 {
            let n = rng.gen_range(1..=14);
            let p = rng.gen_range(0.05..0.6);
            let g = DiGraph::sample_gnp(n, p, rng.gen()).unwrap();
            let s = independent_set_lower_bound(&g, 40);
            assert_eq!(s.size(), alpha_oracle(&g));
            assert!(s.vertices.iter().all(|&u| s.vertices.iter().all(|&v| !g.has_arc(u, v))));
            let greedy = greedy_independent_set(&g);
            assert!(greedy.len() <= s.size());
        }
    }

    /// Chromatic number by trying every colouring with k colours.
    fn chi_oracle(h: &DiGraph) -> usize {
        let n = h.n();
        for k in 1..=n {
            let total = k.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let colors: Vec<usize> = (0..n)
                    .map(|_| {
                        let x = c % k;
                        c /= k;
                        x
                    })
                    .collect();
                if is_proper_coloring(h, &colors) {
                    return k;
                }
            }
        }
        n
    }

    #[test]
    fn clique_cover_examples() {
        let c = clique_cover_upper_bound(&DiGraph::complete(6).unwrap(), 20);
        assert_eq!(c.num_colors, 1);
        assert_eq!(c.witness(f(2)), Matrix::ones(6, 6, f(2)));
        let e = clique_cover_upper_bound(&DiGraph::empty(5).unwrap(), 20);
        assert_eq!(e.num_colors, 5);
        assert_eq!(e.witness(f(3)), Matrix::identity(5, f(3)));
        // one-directional arcs are not cliques
        let g = DiGraph::from_arcs(2, [(0, 1)]).unwrap();
        assert_eq!(clique_cover_upper_bound(&g, 20).num_colors, 2);
    }

    #[test]
    fn exact_cover_matches_oracle_and_witness_verifies() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let n = rng.gen_range(1..=7);
            let g = DiGraph::sample_gnp(n, rng.gen_range(0.3..0.95), rng.gen()).unwrap();
            let h = g.complement().underlying_undirected();
            let c = clique_cover_upper_bound(&g, 20);
            assert_eq!(c.method, Method::Exact);
            assert_eq!(c.num_colors, chi_oracle(&h), "{g:?}");
            assert!(is_proper_coloring(&h, &c.colors));
            for q in [2, 3] {
                let w = c.witness(f(q));
                assert!(g.is_represented_by(&w).unwrap());
                assert_eq!(w.rank(), c.num_colors);
            }
        }
    }

    #[test]
    fn greedy_cover_witness_on_larger_graphs() {
        for seed in 0..5 {
            let g = DiGraph::sample_gnp(64, 0.5, seed).unwrap();
            let c = clique_cover_upper_bound(&g, 20);
            assert_eq!(c.method, Method::Greedy);
            let w = c.witness(f(2));
            assert!(g.is_represented_by(&w).unwrap());
            assert_eq!(w.rank(), c.num_colors);
        }
    }

    #[test]
    fn product_bound_examples() {
        let opts = ExactOptions::default();
        assert!(product_bound_holds(&DiGraph::complete(4).unwrap(), f(2), opts).unwrap());
        assert!(product_bound_holds(&DiGraph::empty(4).unwrap(), f(2), opts).unwrap());
        assert!(product_bound_holds(&cycle5(), f(2), opts).unwrap());
    }

    #[test]
    fn monotone_in_arcs_exhaustive_n3() {
        let opts = ExactOptions::default();
        let pairs: Vec<(usize, usize)> =
            (0..3).flat_map(|u| (0..3).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        let ranks: Vec<usize> = (0u32..64)
            .map(|mask| {
                let g = DiGraph::from_arcs(
                    3,
                    pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &a)| a),
                )
                .unwrap();
                exact_minrank(&g, f(2), opts).unwrap().rank
            })
            .collect();
        for mask in 0..64usize {
            for b in 0..6 {
                assert!(ranks[mask | 1 << b] <= ranks[mask]);
            }
        }
    }

    #[test]
    fn symmetrized_minrank_is_not_smaller() {
        let opts = ExactOptions::default();
        for mask in 0u64..4096 {
            let rows: Vec<u64> = spread_mask(mask, 4);
            let g = DiGraph::from_bitmask_rows(&rows).unwrap();
            // the symmetric graph keeps only arcs present both ways
            let sym = g.complement().underlying_undirected().complement();
            assert!(exact_minrank(&sym, f(2), opts).unwrap().rank >= exact_minrank(&g, f(2), opts).unwrap().rank);
        }
    }

    pub(crate) fn spread_mask(mask: u64, n: usize) -> Vec<u64> {
        let mut rows = vec![0u64; n];
        let mut b = 0;
        for (u, row) in rows.iter_mut().enumerate() {
            for v in 0..n {
                if u != v {
                    if mask >> b & 1 == 1 {
                        *row |= 1 << v;
                    }
                    b += 1;
                }
            }
        }
        rows
    }

    #[test]
    fn sparse_basis_identity_and_zero_diagonal() {
        // every leading block of the identity has relative rank exactly 1, so
        // the search descends straight to the first index
        let id = Matrix::identity(5, f(2));
        let r = sparse_basis_submatrix(&id).unwrap();
        assert_eq!((r.size, r.rank, r.indices.clone(), r.depth), (1, 1, vec![0], 1));
        assert_eq!((r.col_basis_sparsity, r.row_basis_sparsity, r.sparsity), (1, 1, 1));
        // a single nonzero entry is its own answer
        let r = sparse_basis_submatrix(&Matrix::ones(1, 1, f(3))).unwrap();
        assert_eq!((r.size, r.rank, r.depth), (1, 1, 0));
        let mut m = Matrix::ones(4, 4, f(3));
        m.set(2, 2, 0);
        let r = sparse_basis_submatrix(&m).unwrap();
        assert_eq!((r.indices.clone(), r.rank, r.size), (vec![2], 0, 1));
        assert!(r.row_basis.is_empty() && r.col_basis.is_empty());
    }

    #[test]
    fn sparse_basis_adversarial_block_matrix() {
        // two 2x2 blocks of ones with the first column overwritten by ones
        let mut m = Matrix::from_fn(4, 4, f(2), |i, j| (i / 2 == j / 2) as u32);
        for i in 0..4 {
            m.set(i, 0, 1);
        }
        let r = sparse_basis_submatrix(&m).unwrap();
        let sub = m.principal_submatrix(&r.indices).unwrap();
        // postconditions recomputed from scratch
        assert_eq!(sub.rank(), r.rank);
        assert!(r.rank * 4 <= m.rank() * r.size);
        let cols = m.submatrix(&r.indices, &r.col_basis).unwrap();
        let rows = m.submatrix(&r.row_basis, &r.indices).unwrap();
        assert_eq!(cols.rank(), r.rank);
        assert_eq!(rows.rank(), r.rank);
        assert!(cols.sparsity() * r.size <= 2 * sub.sparsity() * r.rank);
        assert!(rows.sparsity() * r.size <= 2 * sub.sparsity() * r.rank);
    }

    #[test]
    fn sparse_basis_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..200 {
            let n = rng.gen_range(1..=24);
            let q = [2, 3][trial % 2];
            let density = rng.gen_range(0.05..0.9);
            let m = Matrix::from_fn(
                n,
                n,
                f(q),
                |i, j| {
                    if i == j || rng.gen_bool(density) {
                        rng.gen_range(1..q)
                    } else {
                        0
                    }
                },
            );
            let r = sparse_basis_submatrix(&m).unwrap();
            let sub = m.principal_submatrix(&r.indices).unwrap();
            assert_eq!(sub.rank(), r.rank);
            assert_eq!(sub.sparsity(), r.sparsity);
        }
    }

    #[test]
    fn report_on_small_graph() {
        let g = cycle5();
        let rep = BoundsReport::compute(&g, f(2), BoundsOptions::default()).unwrap();
        assert_eq!(rep.exact, Some(3));
        assert_eq!(rep.lower_indset, 2);
        assert_eq!(rep.upper_clique_cover, 3);
        assert_eq!(rep.witness_rank, 3);
        let big = DiGraph::sample_gnp(60, 0.5, 1).unwrap();
        let rep = BoundsReport::compute(&big, f(2), BoundsOptions::default()).unwrap();
        assert_eq!(rep.exact, None);
        assert_eq!(rep.cover_method, Method::Greedy);
        assert_eq!(rep.indset_method, Method::Greedy);
    }
}
