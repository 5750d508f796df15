//! Minrank of directed graphs over prime fields.
//!
//! The crate is layered bottom-up: [`field`] arithmetic, dense [`matrix`]
//! linear algebra, directed [`graph`]s, the row/column basis [`codec`],
//! minrank [`bounds`] and certificates, and executable linear
//! [`indexcode`]s built from representing matrices.

pub mod bounds;
pub mod codec;
pub mod field;
pub mod graph;
pub mod indexcode;
pub mod matrix;

pub use codec::{decode, encode, BasisEncoding};
pub use field::{FieldElem, FieldError, FieldSpec};
pub use graph::{is_representing, DiGraph, GraphError};
pub use indexcode::LinearIndexCode;
pub use matrix::{Matrix, MatrixError};
