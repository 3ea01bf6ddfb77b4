//! Maintainability prediction toolkit.
//!
//! Computes Maintainability Index variants from metric tables or source
//! files, benchmarks six regression techniques under cross-validation, and
//! ranks them per dataset with TOPSIS.

mod floats;
pub mod eval;
pub mod ga;
pub mod ingest;
pub mod matrix;
pub mod mi;
pub mod models;
pub mod rng;
pub mod srcmetrics;
pub mod synthetic;
pub mod topsis;

pub use matrix::Matrix;
