//! Bounds for every cyclic shift `G^i` of a graph. Exploratory: the table
//! makes no asymptotic claim.
//!
//! CSV columns: `shift,dropped_loops,` then the bound columns of the scaling
//! table.

use std::io::Write;

use minrank::{DiGraph, FieldSpec};
use rayon::prelude::*;

use crate::row::{BoundRow, HarnessOptions};
use crate::{csv_writer, HarnessError};

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRow {
    pub shift: usize,
    /// Arcs `(u, v)` with `v + shift = u (mod n)`, which would become loops.
    pub dropped_loops: usize,
    pub bounds: BoundRow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftScan {
    pub rows: Vec<ShiftRow>,
    /// Largest lower bound over all shifts.
    pub max_lower: usize,
    /// Smallest upper bound (exact when known) over all shifts.
    pub min_upper: usize,
}

pub fn run_shift_scan(g: &DiGraph, field: FieldSpec, opts: &HarnessOptions) -> Result<ShiftScan, HarnessError> {
    let rows = (0..g.n())
        .into_par_iter()
        .map(|i| {
            let (h, dropped_loops) = g.shift(i)?;
            let bounds = BoundRow::compute(&h, field, opts)?;
            bounds.check(&format!("shift {i}"))?;
            Ok(ShiftRow { shift: i, dropped_loops, bounds })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let max_lower = rows.iter().map(|r| r.bounds.lower()).max().unwrap_or(0);
    let min_upper = rows.iter().map(|r| r.bounds.exact.unwrap_or(r.bounds.upper_clique_cover)).min().unwrap_or(0);
    Ok(ShiftScan { rows, max_lower, min_upper })
}

pub fn write_shift_csv<W: Write>(scan: &ShiftScan, out: W, timings: bool) -> Result<(), HarnessError> {
    let mut w = csv_writer(out);
    let mut header = vec!["shift", "dropped_loops"];
    header.extend(BoundRow::HEADER);
    if timings {
        header.extend(BoundRow::TIME_HEADER);
    }
    w.write_record(&header)?;
    for r in &scan.rows {
        let mut rec = vec![r.shift.to_string(), r.dropped_loops.to_string()];
        rec.extend(r.bounds.fields());
        if timings {
            rec.extend(r.bounds.time_fields());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
