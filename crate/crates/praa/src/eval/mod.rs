//! Evaluation toolkit: stratified folds, classification metrics, the
//! Wilcoxon signed-rank test, the end-to-end pipeline and the scalability
//! benchmark.

pub mod bench;
pub mod folds;
pub mod metrics;
pub mod pipeline;
pub mod wilcoxon;

pub use bench::{bench_scalability, BenchConfig, BenchPoint, BenchReport};
pub use folds::{stratified_folds, Fold, FoldPlan};
pub use metrics::{confusion_metrics, roc_auc, MetricsReport};
pub use pipeline::{run_praa_pipeline, PipelineConfig, PipelineReport};
pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonResult};
