//! End-to-end pipeline: impute, select features by swarm search, then score
//! the selected subset with stratified cross-validation.
//!
//! Per-fold margins and actual labels are pooled across folds and the
//! metrics (accuracy, SE, SP, AUC) come from the pooled sets. Feature
//! selection runs once on the full imputed dataset by default; nested mode
//! reruns it inside every training fold instead.

use crate::adtree::{train_adtree_with_positive, AdTree, Rule};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::eval::folds::stratified_folds;
use crate::eval::metrics::{confusion_metrics, roc_auc, MetricsReport};
use crate::imputer::impute_dataset;
use crate::pso::{run_selection, SwarmConfig};

/// Pipeline knobs. All randomness derives from `seed` by fixed offsets:
/// outer folds use `seed`, the swarm uses `seed + 1`, fitness folds use
/// `seed + 2`.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Outer cross-validation folds.
    pub folds: usize,
    pub swarm: SwarmConfig,
    pub adt_iterations: usize,
    /// Folds of the wrapper fitness evaluation.
    pub fitness_folds: usize,
    /// Rerun feature selection inside each training fold.
    pub nested: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            folds: 10,
            swarm: SwarmConfig::default(),
            adt_iterations: 10,
            fitness_folds: 10,
            nested: false,
        }
    }
}

/// Everything the pipeline produces.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub metrics: MetricsReport,
    pub selected_mask: Vec<bool>,
    pub selected_features: Vec<String>,
    pub selection_fitness: f64,
    pub selection_history: Vec<f64>,
    /// Tree trained on the full imputed dataset with the selected features,
    /// used for rule extraction and serialization.
    pub tree: AdTree,
    pub rules: Vec<Rule>,
    pub imputed_cells: usize,
    pub folds: usize,
}

impl PipelineReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "folds={} imputed_cells={}\nselected features ({}): {}\nselection fitness: {:.6}\n",
            self.folds,
            self.imputed_cells,
            self.selected_features.len(),
            self.selected_features.join(", "),
            self.selection_fitness,
        ));
        out.push_str(&self.metrics.render());
        out.push_str("rules:\n");
        for rule in &self.rules {
            out.push_str(&format!("  {rule}\n"));
        }
        out
    }
}

pub fn run_praa_pipeline(data: &Dataset, config: &PipelineConfig) -> Result<PipelineReport> {
    let (imputed, impute_report) = impute_dataset(data)?;
    let positive = imputed.decision_label(0).to_string();

    let swarm_config = SwarmConfig {
        seed: config.seed + 1,
        ..config.swarm.clone()
    };

    // Selection outside the outer loop (the default) mirrors the pipeline
    // step order; nested mode guards against selection bias instead.
    let selection = if config.nested {
        None
    } else {
        Some(run_selection(
            &imputed,
            swarm_config.clone(),
            config.fitness_folds,
            config.adt_iterations,
            config.seed + 2,
        )?)
    };

    let plan = stratified_folds(&imputed, config.folds, config.seed)?;
    let mut scores = Vec::with_capacity(imputed.n_rows());
    let mut actual: Vec<String> = Vec::with_capacity(imputed.n_rows());
    let mut predicted: Vec<String> = Vec::with_capacity(imputed.n_rows());
    for fold in &plan.folds {
        let mask = match &selection {
            Some(sel) => sel.result.best_mask.clone(),
            None => {
                let train = imputed.subset_rows(&fold.train);
                run_selection(
                    &train,
                    swarm_config.clone(),
                    config.fitness_folds,
                    config.adt_iterations,
                    config.seed + 2,
                )?
                .result
                .best_mask
            }
        };
        let projected = imputed.project(&mask)?;
        let train = projected.subset_rows(&fold.train);
        let tree = train_adtree_with_positive(&train, config.adt_iterations, &positive)?;
        for &i in &fold.test {
            let margin = tree.score(projected.feature_row(i));
            scores.push(margin.score);
            predicted.push(margin.label);
            actual.push(projected.decision_label(i).to_string());
        }
    }

    let actual_refs: Vec<&str> = actual.iter().map(String::as_str).collect();
    let predicted_refs: Vec<&str> = predicted.iter().map(String::as_str).collect();
    let mut metrics = confusion_metrics(&actual_refs, &predicted_refs, &positive)?;
    metrics.auc = Some(roc_auc(&scores, &actual_refs, &positive)?);

    // Final model on everything, for the rule listing and serialization.
    let final_selection = match selection {
        Some(sel) => sel,
        None => run_selection(
            &imputed,
            swarm_config,
            config.fitness_folds,
            config.adt_iterations,
            config.seed + 2,
        )?,
    };
    let projected = imputed.project(&final_selection.result.best_mask)?;
    let tree = train_adtree_with_positive(&projected, config.adt_iterations, &positive)?;
    let rules = tree.extract_rules();

    Ok(PipelineReport {
        metrics,
        selected_mask: final_selection.result.best_mask.clone(),
        selected_features: final_selection.selected_names.clone(),
        selection_fitness: final_selection.result.best_fitness,
        selection_history: final_selection.result.history.clone(),
        tree,
        rules,
        imputed_cells: impute_report.total_filled(),
        folds: config.folds,
    })
}
