//! Pipeline-level integration checks.

mod common;

use praa::dataset::{AttributeKind, AttributeSchema, Cell, Dataset};
use praa::eval::{run_praa_pipeline, PipelineConfig};
use praa::pso::SwarmConfig;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quick_config(seed: u64) -> PipelineConfig {
    PipelineConfig {
        seed,
        folds: 3,
        swarm: SwarmConfig {
            particles: 6,
            iterations: 4,
            seed: 0,
            ..SwarmConfig::default()
        },
        adt_iterations: 4,
        fitness_folds: 3,
        nested: false,
    }
}

/// Labels independent of every feature: pooled AUC should hover around
/// chance level. Averaged over three seeds to damp single-run variance.
#[test]
fn label_shuffled_noise_stays_near_chance() {
    let mut schema: Vec<AttributeSchema> = vec![
        AttributeSchema::new("r0", AttributeKind::Real),
        AttributeSchema::new("c0", AttributeKind::Categorical),
        AttributeSchema::new("i0", AttributeKind::Integer),
    ];
    schema.push(AttributeSchema::new("class", AttributeKind::Decision));

    let mut aucs = Vec::new();
    for seed in [11u64, 12, 13] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<Cell>> = (0..80)
            .map(|i| {
                vec![
                    Cell::Real(rng.gen_range(-10..10) as f64 / 3.0),
                    Cell::Categorical(["a", "b", "c"][rng.gen_range(0..3)].to_string()),
                    Cell::Integer(rng.gen_range(0..5)),
                    Cell::Categorical(if i % 2 == 0 { "1" } else { "0" }.to_string()),
                ]
            })
            .collect();
        let data = Dataset::new(schema.clone(), rows).unwrap();
        let report = run_praa_pipeline(&data, &quick_config(seed)).unwrap();
        aucs.push(report.metrics.auc.unwrap());
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    assert!(
        (0.35..=0.65).contains(&mean),
        "mean AUC {mean} outside the chance band; per seed {aucs:?}"
    );
}

#[test]
fn separable_fixture_is_perfect_without_missingness() {
    let data = common::separable_fixture(120, 3, 0.0, 7);
    let mut config = quick_config(2);
    config.folds = 5;
    let report = run_praa_pipeline(&data, &config).unwrap();
    assert_eq!(report.metrics.accuracy, 1.0);
    assert_eq!(report.metrics.auc, Some(1.0));
    assert!(report.selected_mask[0]);
    assert!(report.imputed_cells == 0);
    let text = report.render();
    assert!(text.contains("accuracy=100.00%"));
    assert!(text.contains("risk"));
}

#[test]
fn report_rules_render_and_tree_round_trips() {
    let data = common::separable_fixture(80, 2, 0.05, 3);
    let mut config = quick_config(9);
    config.folds = 4;
    let report = run_praa_pipeline(&data, &config).unwrap();
    assert!(!report.rules.is_empty());
    for rule in &report.rules {
        assert!(rule.to_string().contains("=> score "));
    }
    let back = praa::adtree::AdTree::deserialize(&report.tree.serialize()).unwrap();
    assert_eq!(back, report.tree);
}
