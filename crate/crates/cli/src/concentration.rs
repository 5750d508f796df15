//! Spread of the clique-cover bound over independent samples of `G(n, p)`.
//!
//! The bound changes by at most one when the arcs at a single vertex change,
//! so its standard deviation should be `O(sqrt(n - 1))`. A report is flagged
//! when the sample deviation exceeds `3 sqrt(n - 1)`.

use std::io::Write;

use minrank::bounds::clique_cover_upper_bound;
use minrank::{DiGraph, FieldSpec};
use rayon::prelude::*;

use crate::row::HarnessOptions;
use crate::scaling::validate_gnp;
use crate::seeds::trial_seed;
use crate::{csv_writer, HarnessError};

/// Gate on `std / sqrt(n - 1)`.
pub const DEVIATION_GATE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub field_order: u32,
    pub seeds: Vec<u64>,
    pub values: Vec<usize>,
    pub mean: f64,
    /// Sample standard deviation (divisor `trials - 1`).
    pub std: f64,
    /// `std / sqrt(n - 1)`; zero when `n = 1`.
    pub normalized: f64,
    pub flagged: bool,
}

impl ConcentrationReport {
    /// Upper limit on `std` implied by the gate.
    pub fn threshold(&self) -> f64 {
        DEVIATION_GATE * ((self.n - 1) as f64).sqrt()
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<(), HarnessError> {
        let mut w = csv_writer(out);
        w.write_record(["n", "p", "trials", "seed", "mean", "std", "normalized_std", "threshold", "flagged"])?;
        w.write_record([
            self.n.to_string(),
            self.p.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            format!("{:.6}", self.mean),
            format!("{:.6}", self.std),
            format!("{:.6}", self.normalized),
            format!("{:.6}", self.threshold()),
            self.flagged.to_string(),
        ])?;
        w.flush()?;
        Ok(())
    }

    pub fn write_values_csv<W: Write>(&self, out: W) -> Result<(), HarnessError> {
        let mut w = csv_writer(out);
        w.write_record(["trial", "seed", "upper_clique_cover"])?;
        for (t, (s, v)) in self.seeds.iter().zip(&self.values).enumerate() {
            w.write_record([t.to_string(), s.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `trials` samples with derived seeds, or with the base seed for every
/// trial when `same_seed` is set (a degenerate run whose deviation is zero).
pub fn run_concentration(
    n: usize,
    p: f64,
    trials: usize,
    seed: u64,
    field: FieldSpec,
    opts: &HarnessOptions,
    same_seed: bool,
) -> Result<ConcentrationReport, HarnessError> {
    validate_gnp(n, p)?;
    if trials < 2 {
        return Err(HarnessError::InvalidParameter("concentration needs at least two trials".into()));
    }
    let seeds: Vec<u64> = (0..trials).map(|t| if same_seed { seed } else { trial_seed(seed, n, p, t) }).collect();
    let values = seeds
        .par_iter()
        .map(|&s| Ok(clique_cover_upper_bound(&DiGraph::sample_gnp(n, p, s)?, opts.cover_exact_limit).num_colors))
        .collect::<Result<Vec<usize>, HarnessError>>()?;
    let as_f: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let (mean, std) = mean_std(&as_f);
    let normalized = if n > 1 { std / ((n - 1) as f64).sqrt() } else { 0.0 };
    Ok(ConcentrationReport {
        n,
        p,
        trials,
        seed,
        field_order: field.order(),
        seeds,
        values,
        mean,
        std,
        normalized,
        flagged: normalized > DEVIATION_GATE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_matches_hand_values() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_seeds_give_zero_spread() {
        let r = run_concentration(40, 0.5, 2, 5, FieldSpec::F2, &HarnessOptions::default(), true).unwrap();
        assert_eq!(r.values[0], r.values[1]);
        assert_eq!(r.std, 0.0);
        assert!(!r.flagged);
    }

    #[test]
    fn gate_is_p_uniform() {
        for p in [0.1, 0.9] {
            let r = run_concentration(64, p, 30, 1, FieldSpec::F2, &HarnessOptions::default(), false).unwrap();
            assert!(!r.flagged, "p={p} std={}", r.std);
        }
    }

    #[test]
    fn needs_two_trials() {
        assert!(run_concentration(10, 0.5, 1, 0, FieldSpec::F2, &HarnessOptions::default(), false).is_err());
    }

    #[test]
    fn summary_layout() {
        let r = run_concentration(16, 0.5, 3, 2, FieldSpec::F2, &HarnessOptions::default(), false).unwrap();
        let mut buf = Vec::new();
        r.write_summary_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,p,trials,seed,mean,std,normalized_std,threshold,flagged\n16,0.5,3,2,"));
        assert!(text.ends_with("11.618950,false\n"));
    }
}
