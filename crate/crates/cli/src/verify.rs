//! Named property suites. Each one sweeps a family of inputs, recomputes the
//! claimed property from scratch and stops at the first violation, which is
//! dumped as the counterexample. Sweeps run from small inputs to large ones
//! so the dump is as small as the suite allows.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use minrank::bounds::{
    clique_cover_upper_bound, exact_minrank, independent_set_lower_bound, product_bound_holds, sparse_basis_submatrix,
    sparsity_lower_bound, ExactOptions, Method,
};
use minrank::codec::{sparse_base_census, sparse_base_count_bound};
use minrank::{decode, encode, DiGraph, FieldSpec, LinearIndexCode, Matrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{csv_writer, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Basis encoding round trip.
    Lemma31,
    /// Exhaustive count of matrices with sparse bases against `(nq)^(6s)`.
    Corollary32,
    /// `s(M) >= n^2 / (4 rank M)` for nonzero-diagonal `M`.
    Lemma33,
    /// Postconditions of the sparse-basis principal submatrix.
    Lemma34,
    /// `minrk(G) minrk(complement G) >= n`, exhaustively on small graphs.
    ProductBound,
    /// Every bound against exact minrank on all graphs with four vertices.
    SandwichN4,
    /// End-to-end index coding with clique-cover codes.
    IndexCode,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Lemma31,
        Suite::Corollary32,
        Suite::Lemma33,
        Suite::Lemma34,
        Suite::ProductBound,
        Suite::SandwichN4,
        Suite::IndexCode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma31 => "lemma31",
            Suite::Corollary32 => "corollary32",
            Suite::Lemma33 => "lemma33",
            Suite::Lemma34 => "lemma34",
            Suite::ProductBound => "product-bound",
            Suite::SandwichN4 => "sandwich-n4",
            Suite::IndexCode => "indexcode",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Suite::ALL.iter().map(|s| s.name()).collect()
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| HarnessError::UnknownSuite(s.to_string()))
    }
}

/// Knobs shared by the suites. `None` means the suite's own default.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyParams {
    pub seed: u64,
    pub field: Option<FieldSpec>,
    /// Matrix or graph size (largest size for sweeps over sizes).
    pub n: Option<usize>,
    pub cases: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub suite: Suite,
    /// Inputs checked before stopping.
    pub cases: usize,
    pub counterexample: Option<String>,
    /// Optional result table, header first.
    pub table: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(suite: Suite) -> Self {
        VerifyReport { suite, cases: 0, counterexample: None, table: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    /// Status line, notes, table as CSV, then the counterexample if any.
    pub fn write<W: Write>(&self, mut out: W) -> Result<(), HarnessError> {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "suite {}: {} cases, {status}", self.suite.name(), self.cases)?;
        for n in &self.notes {
            writeln!(out, "{n}")?;
        }
        if !self.table.is_empty() {
            let mut w = csv_writer(&mut out);
            for r in &self.table {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        if let Some(c) = &self.counterexample {
            writeln!(out, "counterexample:\n{c}")?;
        }
        Ok(())
    }

    fn fail(&mut self, dump: String) {
        self.counterexample = Some(dump);
    }
}

pub fn run_verify(suite: &str, params: VerifyParams) -> Result<VerifyReport, HarnessError> {
    run_suite(suite.parse()?, params)
}

pub fn run_suite(suite: Suite, params: VerifyParams) -> Result<VerifyReport, HarnessError> {
    match suite {
        Suite::Lemma31 => lemma31(params),
        Suite::Corollary32 => corollary32(params),
        Suite::Lemma33 => lemma33(params),
        Suite::Lemma34 => lemma34(params),
        Suite::ProductBound => product_bound(params),
        Suite::SandwichN4 => sandwich(params),
        Suite::IndexCode => indexcode(params),
    }
}

fn field(q: u32) -> FieldSpec {
    FieldSpec::new(q).expect("built-in field orders are prime")
}

fn dump_matrix(m: &Matrix) -> String {
    let mut s = format!("{}x{} over {}\n", m.rows(), m.cols(), m.field());
    for r in m.to_rows() {
        let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "  {}", line.join(" "));
    }
    s
}

fn dump_graph(g: &DiGraph) -> String {
    g.to_edge_list()
}

/// Random `rows x cols` matrix of full rank `min(rows, cols)`.
fn random_full_rank(rows: usize, cols: usize, f: FieldSpec, rng: &mut impl Rng) -> Matrix {
    loop {
        let m = Matrix::random(rows, cols, f, rng);
        if m.rank() == rows.min(cols) {
            return m;
        }
    }
}

/// Random `n x n` matrix of rank exactly `k`.
pub fn random_rank_k(n: usize, k: usize, f: FieldSpec, rng: &mut impl Rng) -> Matrix {
    if k == 0 {
        return Matrix::zeros(n, n, f);
    }
    let a = random_full_rank(n, k, f, rng);
    let b = random_full_rank(k, n, f, rng);
    a.mul(&b).expect("inner dimensions agree")
}

fn nonzero(f: FieldSpec, rng: &mut impl Rng) -> u32 {
    rng.gen_range(1..f.order())
}

/// Nonzero diagonal, off-diagonal entries nonzero with probability `density`.
pub fn random_nonzero_diagonal(n: usize, density: f64, f: FieldSpec, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(n, n, f, |i, j| if i == j || rng.gen_bool(density) { nonzero(f, rng) } else { 0 })
}

/// Block diagonal with `blocks` blocks of nonzero rows (each row a nonzero
/// multiple of the all-ones block row), under a random symmetric
/// permutation. Rank equals the block count and the diagonal is nonzero.
pub fn random_block_matrix(n: usize, blocks: usize, f: FieldSpec, rng: &mut impl Rng) -> Matrix {
    let mut class: Vec<usize> = (0..n).map(|i| i % blocks).collect();
    class.shuffle(rng);
    let scale: Vec<u32> = (0..n).map(|_| nonzero(f, rng)).collect();
    Matrix::from_fn(n, n, f, |i, j| if class[i] == class[j] { scale[i] } else { 0 })
}

/// Block matrix whose column `heavy` is overwritten with nonzeros, which
/// puts a single very dense column into the matrix.
pub fn column_concentrated(n: usize, blocks: usize, f: FieldSpec, rng: &mut impl Rng) -> Matrix {
    let mut m = random_block_matrix(n, blocks, f, rng);
    let heavy = rng.gen_range(0..n);
    for i in 0..n {
        let v = nonzero(f, rng);
        m.set(i, heavy, v);
    }
    m
}

fn lemma31(p: VerifyParams) -> Result<VerifyReport, HarnessError> {
    let mut rep = VerifyReport::new(Suite::Lemma31);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let max_n = p.n.unwrap_or(12).max(1);
    let cases = p.cases.unwrap_or(1000);
    for c in 0..cases {
        let f = p.field.unwrap_or_else(|| field([2, 3, 5][c % 3]));
        let n = 1 + (c / 3) % max_n;
        let k = rng.gen_range(0..=n);
        let m = random_rank_k(n, k, f, &mut rng);
        rep.cases += 1;
        let enc = encode(&m)?;
        let back = decode(&enc)?;
        if enc.rank() != k || back != m || enc.field_elements() != 2 * k * n {
            rep.fail(format!(
                "rank {k}, encoded rank {}\n{}decoded\n{}",
                enc.rank(),
                dump_matrix(&m),
                dump_matrix(&back)
            ));
            break;
        }
    }
    Ok(rep)
}

fn corollary32(p: VerifyParams) -> Result<VerifyReport, HarnessError> {
    let mut rep = VerifyReport::new(Suite::Corollary32);
    let f = p.field.unwrap_or(FieldSpec::F2);
    let sizes: Vec<usize> = match p.n {
        Some(n) => vec![n],
        None => (1..=3).collect(),
    };
    rep.table.push(["n", "k", "s", "count", "bound"].map(String::from).to_vec());
    for n in sizes {
        let census = sparse_base_census(n, f, 1 << 20)?;
        for k in 0..=n {
            for s in 0..=n * n {
                let count = census.count(k, s);
                let bound = sparse_base_count_bound(n, f.order(), s);
                rep.cases += 1;
                rep.table.push(vec![n.to_string(), k.to_string(), s.to_string(), count.to_string(), bound.to_string()]);
                if bound < count.into() {
                    rep.fail(format!("n={n} k={k} s={s} over {f}: count {count} > bound {bound}"));
                    return Ok(rep);
                }
            }
        }
    }
    Ok(rep)
}

fn lemma33(p: VerifyParams) -> Result<VerifyReport, HarnessError> {
    let mut rep = VerifyReport::new(Suite::Lemma33);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.n.unwrap_or(32).max(1);
    let cases = p.cases.unwrap_or(1000);
    for c in 0..cases {
        let f = p.field.unwrap_or_else(|| field([2, 3][c % 2]));
        let m = match (c / 2) % 3 {
            0 => random_nonzero_diagonal(n, rng.gen_range(0.0..1.0), f, &mut rng),
            1 => random_nonzero_diagonal(n, rng.gen_range(0.0..4.0 / n as f64).min(1.0), f, &mut rng),
            _ => random_block_matrix(n, rng.gen_range(1..=n), f, &mut rng),
        };
        rep.cases += 1;
        let (s, r) = (m.sparsity(), m.rank());
        if 4 * s * r < n * n {
            rep.fail(format!("sparsity {s}, rank {r}, n {n}\n{}", dump_matrix(&m)));
            break;
        }
    }
    Ok(rep)
}

/// Recomputes every postcondition of the sparse-basis search from the
/// returned index sets. Returns a description of the first failure.
pub fn check_sparse_basis_result(m: &Matrix) -> Result<Option<String>, HarnessError> {
    let n = m.rows();
    let k = m.rank();
    let r = sparse_basis_submatrix(m)?;
    let idx = &r.indices;
    if idx.is_empty() || idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= n) {
        return Ok(Some(format!("bad index set {idx:?}")));
    }
    let sub = m.principal_submatrix(idx)?;
    let (n2, k2, s2) = (idx.len(), sub.rank(), sub.sparsity());
    if k2 * n > k * n2 {
        return Ok(Some(format!("relative rank {k2}/{n2} exceeds {k}/{n}")));
    }
    for (name, basis) in [("row", &r.row_basis), ("column", &r.col_basis)] {
        if basis.len() != k2 || basis.iter().any(|b| idx.binary_search(b).is_err()) {
            return Ok(Some(format!("{name} basis {basis:?} is not {k2} indices of {idx:?}")));
        }
        let part = if name == "row" { m.submatrix(basis, idx)? } else { m.submatrix(idx, basis)? };
        if part.rank() != k2 {
            return Ok(Some(format!("{name} basis {basis:?} has rank {} not {k2}", part.rank())));
        }
        if part.sparsity() * n2 > 2 * s2 * k2 {
            return Ok(Some(format!(
                "{name} basis sparsity {} exceeds 2 * {s2} * {k2} / {n2} on {idx:?}",
                part.sparsity()
            )));
        }
    }
    Ok(None)
}

fn lemma34(p: VerifyParams) -> Result<VerifyReport, HarnessError> {
    let mut rep = VerifyReport::new(Suite::Lemma34);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let max_n = p.n.unwrap_or(64).max(2);
    let cases = p.cases.unwrap_or(1000);
    let mut families = [0usize; 3];
    for c in 0..cases {
        let f = p.field.unwrap_or_else(|| field([2, 3][c % 2]));
        // sizes grow with the case index so early failures are small
        let n = 2 + (c * (max_n - 1)) / cases.max(1);
        let family = (c / 2) % 3;
        families[family] += 1;
        let m = match family {
            0 => {
                let mut m = random_nonzero_diagonal(n, 0.5, f, &mut rng);
                if rng.gen_bool(0.1) {
                    let i = rng.gen_range(0..n);
                    m.set(i, i, 0);
                }
                m
            }
            1 => random_nonzero_diagonal(n, 3.0 / n as f64, f, &mut rng),
            _ => column_concentrated(n, rng.gen_range(1..=n.div_ceil(2)), f, &mut rng),
        };
        rep.cases += 1;
        if let Some(why) = check_sparse_basis_result(&m)? {
            rep.fail(format!("{why}\n{}", dump_matrix(&m)));
            break;
        }
    }
    rep.notes.push(format!("dense {}, sparse {}, column-concentrated {}", families[0], families[1], families[2]));
    Ok(rep)
}

/// Graph on `n` vertices whose off-diagonal pairs, in row-major order, are
/// the bits of `code`.
pub fn graph_from_code(n: usize, code: u64) -> DiGraph {
    let pairs = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)));
    let arcs = pairs.enumerate().filter(|&(b, _)| code >> b & 1 == 1).map(|(_, a)| a);
    DiGraph::from_arcs(n, arcs).expect("pairs are in range and loop-free")
}

fn product_bound(p: VerifyParams) -> Result<VerifyReport, HarnessError> {
    let mut rep = VerifyReport::new(Suite::ProductBound);
    let f = p.field.unwrap_or(FieldSpec::F2);
    let max_n = p.n.unwrap_or(4);
    for n in 1..=max_n {
        for code in 0..1u64 << (n * (n - 1)) {
            let g = graph_from_code(n, code);
            rep.cases += 1;
            if !product_bound_holds(&g, f, ExactOptions::default())? {
                rep.fail(format!("product bound fails over {f}\n{}", dump_graph(&g)));
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}

fn sandwich(p: VerifyParams) -> Result<VerifyReport, HarnessError> {
    let mut rep = VerifyReport::new(Suite::SandwichN4);
    let f = p.field.unwrap_or(FieldSpec::F2);
    let n = p.n.unwrap_or(4);
    let total = 1u64 << (n * (n - 1));
    let exact: Vec<usize> = (0..total)
        .map(|code| Ok(exact_minrank(&graph_from_code(n, code), f, ExactOptions::default())?.rank))
        .collect::<Result<_, HarnessError>>()?;
    // the complement of code c is code !c
    let mask = total - 1;
    for code in 0..total {
        let g = graph_from_code(n, code);
        rep.cases += 1;
        let x = exact[code as usize];
        let lower = sparsity_lower_bound(&g).max(independent_set_lower_bound(&g, n).size());
        let cover = clique_cover_upper_bound(&g, n);
        let xc = exact[(!code & mask) as usize];
        let exact_methods = cover.method == Method::Exact;
        if lower > x || x > cover.num_colors || x * xc < n || !exact_methods {
            rep.fail(format!(
                "lower {lower}, exact {x}, clique cover {}, complement exact {xc}\n{}",
                cover.num_colors,
                dump_graph(&g)
            ));
            break;
        }
    }
    Ok(rep)
}

fn indexcode(p: VerifyParams) -> Result<VerifyReport, HarnessError> {
    let mut rep = VerifyReport::new(Suite::IndexCode);
    let f = p.field.unwrap_or(FieldSpec::F2);
    let n = p.n.unwrap_or(16).max(1);
    let graphs = p.cases.unwrap_or(100);
    let messages = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut decodes = 0u64;
    let mut total_len = 0usize;
    for _ in 0..graphs {
        let g = DiGraph::sample_gnp(n, 0.5, rng.gen())?;
        let w = clique_cover_upper_bound(&g, n).witness(f);
        let code = LinearIndexCode::build(&g, &w)?;
        rep.cases += 1;
        total_len += code.k();
        if code.k() != w.rank() {
            rep.fail(format!("broadcast length {} but witness rank {}\n{}", code.k(), w.rank(), dump_graph(&g)));
            return Ok(rep);
        }
        for _ in 0..messages {
            let x: Vec<u32> = (0..n).map(|_| rng.gen_range(0..f.order())).collect();
            let y = code.broadcast(&x)?;
            for (i, &xi) in x.iter().enumerate() {
                let got = code.decode_symbol(i, &y, &code.side_information(i, &x)?)?;
                decodes += 1;
                if got != xi {
                    rep.fail(format!("receiver {i} decoded {got}, sent {xi}, message {x:?}\n{}", dump_graph(&g)));
                    return Ok(rep);
                }
            }
        }
    }
    rep.notes.push(format!(
        "{decodes} decodes; mean broadcast length {:.3} against naive length {n}",
        total_len as f64 / graphs.max(1) as f64
    ));
    Ok(rep)
}
