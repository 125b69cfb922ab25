//! Randomized invariants over the statistical primitives.

mod common;

use praa::dataset::skewness;
use praa::eval::{roc_auc, wilcoxon_signed_rank};
use praa::proximity::{CrossRealSets, IndexContext};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn skewness_is_antisymmetric_about_the_mean(
        values in prop::collection::vec(-1e3f64..1e3, 1..40)
    ) {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let reflected: Vec<f64> = values.iter().map(|v| 2.0 * mean - v).collect();
        let (a, b) = (skewness(&values), skewness(&reflected));
        prop_assert!((a + b).abs() < 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn wilcoxon_rank_sums_always_total_the_triangle_number(
        pairs in prop::collection::vec((-50i32..50, -50i32..50), 1..30)
    ) {
        let pairs: Vec<(f64, f64)> = pairs
            .iter()
            .map(|(a, b)| (f64::from(*a) / 4.0, f64::from(*b) / 4.0))
            .collect();
        match wilcoxon_signed_rank(&pairs) {
            Ok(r) => {
                let n = r.n as f64;
                prop_assert!((r.w_plus + r.w_minus - n * (n + 1.0) / 2.0).abs() < 1e-9);
                prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
            }
            Err(_) => {
                prop_assert!(pairs.iter().all(|(a, b)| a == b));
            }
        }
    }

    #[test]
    fn auc_always_matches_pair_counting(
        scored in prop::collection::vec((0u8..8, prop::bool::ANY), 2..50)
    ) {
        let scores: Vec<f64> = scored.iter().map(|(s, _)| f64::from(*s) / 8.0).collect();
        let labels: Vec<&str> = scored.iter().map(|(_, p)| if *p { "p" } else { "n" }).collect();
        match roc_auc(&scores, &labels, "p") {
            Ok(auc) => {
                let oracle = common::oracle_auc(&scores, &labels, "p");
                prop_assert!((auc - oracle).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&auc));
            }
            Err(_) => {
                let positives = labels.iter().filter(|l| **l == "p").count();
                prop_assert!(positives == 0 || positives == labels.len());
            }
        }
    }

    #[test]
    fn distances_never_exceed_the_feature_norm_bound(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = common::random_mixed_dataset(&mut rng, 9, 4);
        let ctx = IndexContext::new(&data, CrossRealSets::Paper).unwrap();
        let matrix = ctx.distance_matrix();
        let bound = (data.n_features() as f64).sqrt() + 1e-12;
        for i in 0..data.n_rows() {
            for k in 0..data.n_rows() {
                prop_assert!(matrix.get(i, k) <= bound);
            }
        }
    }

    #[test]
    fn symmetric_mode_matrix_is_also_symmetric(seed in 0u64..2000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = common::random_mixed_dataset(&mut rng, 8, 3);
        let ctx = IndexContext::new(&data, CrossRealSets::Symmetric).unwrap();
        let matrix = ctx.distance_matrix();
        for i in 0..data.n_rows() {
            for k in 0..data.n_rows() {
                prop_assert_eq!(matrix.get(i, k).to_bits(), matrix.get(k, i).to_bits());
            }
        }
    }
}
