//! Bounds on `G(n, p)` across a list of sizes.
//!
//! CSV columns, in order:
//!
//! `n,p,seed,trial,arc_count,lower_sparsity,lower_indset,indset_method,upper_clique_cover,cover_method,exact,exact_method`
//!
//! followed by `t_sparsity,t_indset,t_cover,t_exact` (seconds, three
//! decimals) when timings are requested. `seed` is the derived per-trial
//! seed, so `minrank sample --n N --p P --seed SEED` rebuilds the graph of
//! that row. `exact` is empty unless `exact_method` is `exact`.

use std::io::Write;

use minrank::{DiGraph, FieldSpec};
use rayon::prelude::*;

use crate::row::{BoundRow, HarnessOptions};
use crate::seeds::trial_seed;
use crate::{csv_writer, HarnessError};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub trial: usize,
    pub bounds: BoundRow,
}

pub fn validate_gnp(n: usize, p: f64) -> Result<(), HarnessError> {
    if n == 0 {
        return Err(HarnessError::InvalidParameter("n must be positive".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(HarnessError::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// Samples `trials` graphs `G(n, p)` for every `n` in `n_list` and bounds
/// each one. Rows come back in `(n, trial)` order. Any row with a lower
/// bound above an upper bound aborts the run.
pub fn run_scaling(
    n_list: &[usize],
    p: f64,
    trials: usize,
    seed: u64,
    field: FieldSpec,
    opts: &HarnessOptions,
) -> Result<Vec<ScalingRow>, HarnessError> {
    if n_list.is_empty() || trials == 0 {
        return Err(HarnessError::InvalidParameter("need at least one size and one trial".into()));
    }
    for &n in n_list {
        validate_gnp(n, p)?;
    }
    let jobs: Vec<(usize, usize)> = n_list.iter().flat_map(|&n| (0..trials).map(move |t| (n, t))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let s = trial_seed(seed, n, p, trial);
            let g = DiGraph::sample_gnp(n, p, s)?;
            let bounds = BoundRow::compute(&g, field, opts)?;
            Ok(ScalingRow { n, p, seed: s, trial, bounds })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    for r in &rows {
        r.bounds.check(&format!("n={} p={} trial={} seed={}", r.n, r.p, r.trial, r.seed))?;
    }
    Ok(rows)
}

pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], out: W, timings: bool) -> Result<(), HarnessError> {
    let mut w = csv_writer(out);
    let mut header = vec!["n", "p", "seed", "trial"];
    header.extend(BoundRow::HEADER);
    if timings {
        header.extend(BoundRow::TIME_HEADER);
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.n.to_string(), r.p.to_string(), r.seed.to_string(), r.trial.to_string()];
        rec.extend(r.bounds.fields());
        if timings {
            rec.extend(r.bounds.time_fields());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
