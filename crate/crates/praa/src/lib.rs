//! Toolkit for risk prediction over mixed-type tabular data with missing
//! values: a nonparametric skew-aware proximity index, proximity-driven
//! imputation (plus a k-nearest-neighbor baseline), alternating decision
//! tree classification, binary particle swarm wrapper feature selection,
//! and an evaluation harness with stratified cross-validation, ROC metrics,
//! Wilcoxon signed-rank comparison and a runtime scalability benchmark.
//!
//! Start from [`dataset::Dataset`] and [`eval::run_praa_pipeline`], or see
//! the `examples/` directory for one runnable program per capability.

pub mod adtree;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod imputer;
pub mod proximity;
pub mod pso;

pub use error::{Error, Result};
