//! Experiment harness for the `minrank` library: random-graph scaling runs,
//! concentration reports, shift scans and the verification suites behind
//! the `minrank` command.
//!
//! Every entry point is a pure function of its arguments. Trials may run in
//! parallel but results always come back in `(n, trial)` order.

pub mod concentration;
pub mod row;
pub mod scaling;
pub mod seeds;
pub mod shifts;
pub mod verify;

use minrank::bounds::BoundsError;
use minrank::codec::CodecError;
use minrank::graph::GraphError;
use minrank::indexcode::IndexCodeError;
use minrank::matrix::MatrixError;
use thiserror::Error;

pub use concentration::{run_concentration, ConcentrationReport};
pub use row::{BoundRow, ExactStatus, HarnessOptions};
pub use scaling::{run_scaling, write_scaling_csv, ScalingRow};
pub use seeds::trial_seed;
pub use shifts::{run_shift_scan, write_shift_csv, ShiftRow, ShiftScan};
pub use verify::{run_verify, Suite, VerifyParams, VerifyReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown suite `{0}`; expected one of {list}", list = Suite::names().join(", "))]
    UnknownSuite(String),
    /// A lower bound came out above an upper bound. This would falsify one of
    /// the bound implementations, so the run stops.
    #[error("bound violation at {context}: lower {lower} > upper {upper}")]
    BoundViolation { context: String, lower: usize, upper: usize },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    IndexCode(#[from] IndexCodeError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// CSV writer with the project conventions: comma separated, header row,
/// LF line endings.
pub fn csv_writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Seconds with three decimals, as used in every timing column.
pub fn format_seconds(d: std::time::Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}
