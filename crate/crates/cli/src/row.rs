//! One row of bounds for one graph, shared by the scaling and shift tables.

use std::time::{Duration, Instant};

use minrank::bounds::{
    clique_cover_with_deadline, exact_minrank, exact_search_size, independent_set_with_deadline, sparsity_lower_bound,
    BoundsError, ExactOptions, Method, DEFAULT_COVER_EXACT_LIMIT, DEFAULT_EXACT_BUDGET, DEFAULT_INDSET_EXACT_LIMIT,
};
use minrank::{DiGraph, FieldSpec};

use crate::{format_seconds, HarnessError};

#[derive(Debug, Clone, Copy)]
pub struct HarnessOptions {
    /// Wall-clock limit for each individual bound.
    pub time_limit: Duration,
    /// Exact minrank is attempted only when its enumeration fits this.
    pub exact_budget: u128,
    pub indset_exact_limit: usize,
    pub cover_exact_limit: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            time_limit: Duration::from_secs(60),
            exact_budget: DEFAULT_EXACT_BUDGET,
            indset_exact_limit: DEFAULT_INDSET_EXACT_LIMIT,
            cover_exact_limit: DEFAULT_COVER_EXACT_LIMIT,
        }
    }
}

/// What happened to the exact minrank column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactStatus {
    Exact,
    /// The search did not fit the budget and was not started.
    Skipped,
    Timeout,
}

impl ExactStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ExactStatus::Exact => "exact",
            ExactStatus::Skipped => "skipped",
            ExactStatus::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundTimes {
    pub sparsity: Duration,
    pub indset: Duration,
    pub cover: Duration,
    pub exact: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub arc_count: usize,
    pub lower_sparsity: usize,
    pub lower_indset: usize,
    pub indset_method: Method,
    pub upper_clique_cover: usize,
    pub cover_method: Method,
    pub exact: Option<usize>,
    pub exact_status: ExactStatus,
    pub times: BoundTimes,
}

impl BoundRow {
    pub const HEADER: [&'static str; 8] = [
        "arc_count",
        "lower_sparsity",
        "lower_indset",
        "indset_method",
        "upper_clique_cover",
        "cover_method",
        "exact",
        "exact_method",
    ];
    pub const TIME_HEADER: [&'static str; 4] = ["t_sparsity", "t_indset", "t_cover", "t_exact"];

    pub fn compute(g: &DiGraph, field: FieldSpec, opts: &HarnessOptions) -> Result<Self, HarnessError> {
        let mut times = BoundTimes::default();

        let t = Instant::now();
        let lower_sparsity = sparsity_lower_bound(g);
        times.sparsity = t.elapsed();

        let t = Instant::now();
        let indset = independent_set_with_deadline(g, opts.indset_exact_limit, Some(t + opts.time_limit));
        times.indset = t.elapsed();

        let t = Instant::now();
        let cover = clique_cover_with_deadline(g, opts.cover_exact_limit, Some(t + opts.time_limit));
        times.cover = t.elapsed();

        let t = Instant::now();
        let (exact, exact_status) = if exact_search_size(g, field, false) > opts.exact_budget {
            (None, ExactStatus::Skipped)
        } else {
            let eo =
                ExactOptions { budget: opts.exact_budget, pin_diagonal: false, deadline: Some(t + opts.time_limit) };
            match exact_minrank(g, field, eo) {
                Ok(e) => (Some(e.rank), ExactStatus::Exact),
                Err(BoundsError::Timeout) => (None, ExactStatus::Timeout),
                Err(BoundsError::BudgetExceeded { .. }) => (None, ExactStatus::Skipped),
                Err(e) => return Err(e.into()),
            }
        };
        times.exact = t.elapsed();

        Ok(BoundRow {
            arc_count: g.arc_count(),
            lower_sparsity,
            lower_indset: indset.size(),
            indset_method: indset.method,
            upper_clique_cover: cover.num_colors,
            cover_method: cover.method,
            exact,
            exact_status,
            times,
        })
    }

    /// The better of the two lower bounds.
    pub fn lower(&self) -> usize {
        self.lower_sparsity.max(self.lower_indset)
    }

    /// Fails when any lower bound exceeds any upper bound.
    pub fn check(&self, context: &str) -> Result<(), HarnessError> {
        let lower = self.lower();
        let upper = self.exact.unwrap_or(self.upper_clique_cover);
        let bad = |lower, upper| HarnessError::BoundViolation { context: context.to_string(), lower, upper };
        if lower > upper {
            return Err(bad(lower, upper));
        }
        if let Some(x) = self.exact {
            if x > self.upper_clique_cover {
                return Err(bad(x, self.upper_clique_cover));
            }
        }
        Ok(())
    }

    pub fn fields(&self) -> Vec<String> {
        vec![
            self.arc_count.to_string(),
            self.lower_sparsity.to_string(),
            self.lower_indset.to_string(),
            self.indset_method.as_str().to_string(),
            self.upper_clique_cover.to_string(),
            self.cover_method.as_str().to_string(),
            self.exact.map_or(String::new(), |x| x.to_string()),
            self.exact_status.as_str().to_string(),
        ]
    }

    pub fn time_fields(&self) -> Vec<String> {
        let t = &self.times;
        [t.sparsity, t.indset, t.cover, t.exact].into_iter().map(format_seconds).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph_gets_every_bound() {
        let g = DiGraph::from_arcs(5, (0..5).flat_map(|i| [(i, (i + 1) % 5), ((i + 1) % 5, i)])).unwrap();
        let row = BoundRow::compute(&g, FieldSpec::F2, &HarnessOptions::default()).unwrap();
        assert_eq!((row.lower_indset, row.exact, row.upper_clique_cover), (2, Some(3), 3));
        assert_eq!(row.exact_status, ExactStatus::Exact);
        assert_eq!(row.fields()[6..], ["3".to_string(), "exact".to_string()]);
        row.check("c5").unwrap();
    }

    #[test]
    fn large_graph_skips_exact() {
        let g = DiGraph::sample_gnp(40, 0.5, 3).unwrap();
        let row = BoundRow::compute(&g, FieldSpec::F2, &HarnessOptions::default()).unwrap();
        assert_eq!(row.exact, None);
        assert_eq!(row.exact_status, ExactStatus::Skipped);
        assert_eq!(row.fields()[6], "");
    }

    #[test]
    fn violations_are_reported() {
        let g = DiGraph::empty(3).unwrap();
        let mut row = BoundRow::compute(&g, FieldSpec::F2, &HarnessOptions::default()).unwrap();
        row.check("empty").unwrap();
        row.lower_indset = 4;
        assert!(matches!(row.check("x"), Err(HarnessError::BoundViolation { lower: 4, upper: 3, .. })));
    }
}
