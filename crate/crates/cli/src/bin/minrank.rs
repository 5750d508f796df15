use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use minrank::bounds::{exact_minrank, BoundsOptions, BoundsReport, ExactOptions, DEFAULT_EXACT_BUDGET};
use minrank::{DiGraph, FieldSpec, LinearIndexCode, Matrix};
use minrank_harness::{
    csv_writer, run_concentration, run_scaling, run_shift_scan, run_verify, write_scaling_csv, write_shift_csv,
    HarnessOptions, Suite, VerifyParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "minrank", version, about = "Minrank bounds, exact search and index-coding experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Prime field order.
    #[arg(long, default_value = "2", value_parser = parse_field)]
    field: FieldSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest number of matrices an exact search may enumerate.
    #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
    exact_budget: u128,
    /// Per-bound time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
}

impl Common {
    fn harness(&self) -> HarnessOptions {
        HarnessOptions {
            time_limit: Duration::from_secs_f64(self.time_limit),
            exact_budget: self.exact_budget,
            ..HarnessOptions::default()
        }
    }

    fn exact(&self) -> ExactOptions {
        ExactOptions {
            budget: self.exact_budget,
            deadline: Some(std::time::Instant::now() + Duration::from_secs_f64(self.time_limit)),
            ..ExactOptions::default()
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        open_out(self.out.as_deref())
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample G(n, p), or a d-out-regular graph with --out-degree, as an edge list.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long)]
        out_degree: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Every bound for one graph as a CSV row.
    Bounds {
        #[arg(long)]
        graph_in: PathBuf,
        /// Also write the independent set, colouring and witness matrix as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact minrank and an optimal representing matrix.
    Exact {
        #[arg(long)]
        graph_in: PathBuf,
        /// Fix diagonal entries to 1 (does not change the minimum).
        #[arg(long)]
        pin_diagonal: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Build the best affordable linear index code and simulate broadcasts.
    Simulate {
        #[arg(long)]
        graph_in: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bounds on G(n, p) for several sizes.
    Scaling {
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Append wall-clock columns (makes the output non-reproducible).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Spread of the clique-cover bound over samples of G(n, p).
    Concentration {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Use the base seed for every trial.
        #[arg(long)]
        same_seed: bool,
        /// Per-trial values as CSV.
        #[arg(long)]
        values_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Bounds for every cyclic shift of a graph.
    Shifts {
        #[arg(long, conflicts_with_all = ["n", "out_degree"])]
        graph_in: Option<PathBuf>,
        /// Sample a random out-regular graph of this size instead.
        #[arg(long, requires = "out_degree")]
        n: Option<usize>,
        #[arg(long)]
        out_degree: Option<usize>,
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a property suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_field)]
        field: Option<FieldSpec>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        cases: Option<usize>,
    },
}

fn parse_field(s: &str) -> Result<FieldSpec, String> {
    let q: u32 = s.parse().map_err(|e| format!("{e}"))?;
    FieldSpec::new(q).map_err(|e| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: minrank_harness::HarnessError| e.to_string())
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_graph(path: &Path) -> Result<DiGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DiGraph::parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn matrix_json(m: &Matrix) -> serde_json::Value {
    serde_json::json!(m.to_rows())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns `Ok(false)` when a check failed and the exit status should say so.
fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Sample { n, p, out_degree, seed, graph_out } => {
            let g = match out_degree {
                Some(d) => DiGraph::sample_out_regular(n, d, seed)?,
                None => DiGraph::sample_gnp(n, p, seed)?,
            };
            open_out(graph_out.as_deref())?.write_all(g.to_edge_list().as_bytes())?;
            Ok(true)
        }
        Cmd::Bounds { graph_in, json, common } => {
            let g = read_graph(&graph_in)?;
            let opts = BoundsOptions { exact: common.exact(), ..BoundsOptions::default() };
            let rep = BoundsReport::compute(&g, common.field, opts)?;
            let mut w = csv_writer(common.output()?);
            w.write_record([
                "n",
                "arc_count",
                "field",
                "lower_sparsity",
                "lower_indset",
                "indset_method",
                "upper_clique_cover",
                "cover_method",
                "exact",
                "witness_rank",
            ])?;
            w.write_record([
                rep.n.to_string(),
                rep.arc_count.to_string(),
                rep.field_order.to_string(),
                rep.lower_sparsity.to_string(),
                rep.lower_indset.to_string(),
                rep.indset_method.as_str().to_string(),
                rep.upper_clique_cover.to_string(),
                rep.cover_method.as_str().to_string(),
                rep.exact.map_or(String::new(), |x| x.to_string()),
                rep.witness_rank.to_string(),
            ])?;
            w.flush()?;
            if let Some(path) = json {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                serde_json::to_writer_pretty(BufWriter::new(f), &rep)?;
            }
            Ok(true)
        }
        Cmd::Exact { graph_in, pin_diagonal, common } => {
            let g = read_graph(&graph_in)?;
            let e = exact_minrank(&g, common.field, ExactOptions { pin_diagonal, ..common.exact() })?;
            let doc = serde_json::json!({
                "n": g.n(),
                "field": common.field.order(),
                "minrank": e.rank,
                "witness": matrix_json(&e.witness),
            });
            let mut out = common.output()?;
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
            Ok(true)
        }
        Cmd::Simulate { graph_in, trials, common } => {
            let g = read_graph(&graph_in)?;
            let f = common.field;
            let opts = BoundsOptions { exact: common.exact(), ..BoundsOptions::default() };
            let rep = BoundsReport::compute(&g, f, opts)?;
            let m = Matrix::from_rows(f, &rep.witness_matrix)?;
            let code = LinearIndexCode::build(&g, &m)?;
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let (mut decodes, mut successes) = (0u64, 0u64);
            for _ in 0..trials {
                let x: Vec<u32> = (0..g.n()).map(|_| rng.gen_range(0..f.order())).collect();
                let y = code.broadcast(&x)?;
                for (i, &xi) in x.iter().enumerate() {
                    decodes += 1;
                    successes += (code.decode_symbol(i, &y, &code.side_information(i, &x)?)? == xi) as u64;
                }
            }
            let source = if rep.exact.is_some() { "exact" } else { "clique_cover" };
            let mut w = csv_writer(common.output()?);
            w.write_record([
                "n",
                "field",
                "code",
                "broadcast_length",
                "naive_length",
                "trials",
                "decodes",
                "successes",
            ])?;
            w.write_record([
                g.n().to_string(),
                f.order().to_string(),
                source.to_string(),
                code.k().to_string(),
                g.n().to_string(),
                trials.to_string(),
                decodes.to_string(),
                successes.to_string(),
            ])?;
            w.flush()?;
            Ok(successes == decodes)
        }
        Cmd::Scaling { n_list, p, trials, timings, common } => {
            let rows = run_scaling(&n_list, p, trials, common.seed, common.field, &common.harness())?;
            write_scaling_csv(&rows, common.output()?, timings)?;
            Ok(true)
        }
        Cmd::Concentration { n, p, trials, same_seed, values_out, common } => {
            let rep = run_concentration(n, p, trials, common.seed, common.field, &common.harness(), same_seed)?;
            rep.write_summary_csv(common.output()?)?;
            if let Some(path) = values_out {
                rep.write_values_csv(open_out(Some(&path))?)?;
            }
            if rep.flagged {
                eprintln!("std {:.3} exceeds {:.3}", rep.std, rep.threshold());
            }
            Ok(!rep.flagged)
        }
        Cmd::Shifts { graph_in, n, out_degree, timings, common } => {
            let g = match (graph_in, n, out_degree) {
                (Some(path), _, _) => read_graph(&path)?,
                (None, Some(n), Some(d)) => DiGraph::sample_out_regular(n, d, common.seed)?,
                _ => bail!("give --graph-in, or --n with --out-degree"),
            };
            let scan = run_shift_scan(&g, common.field, &common.harness())?;
            write_shift_csv(&scan, common.output()?, timings)?;
            eprintln!("max lower bound over shifts {}, min upper bound over shifts {}", scan.max_lower, scan.min_upper);
            Ok(true)
        }
        Cmd::Verify { suite, seed, field, n, cases } => {
            let rep = run_verify(suite.name(), VerifyParams { seed, field, n, cases })?;
            rep.write(io::stdout().lock())?;
            Ok(rep.passed())
        }
    }
}
