//! Exact arithmetic over the rational function field in the system
//! parameters, plus sparse linear algebra with genericity tracking.

pub mod matrix;
pub mod poly;
pub mod scalar;

pub use matrix::{normalize_row_content, Rref, ScalarMatrix, SparseRow};
pub use poly::{Monomial, Poly};
pub use scalar::{merge_conditions, GenericityCondition, ParamScalar};
