//! Reproducible synthetic tabular data with MCAR missingness.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AttributeKind, AttributeSchema, Cell, Dataset};
use crate::error::{Error, Result};

const CATEGORY_LABELS: [&str; 4] = ["a", "b", "c", "d"];

/// Generate `m` records over `n` columns (`n - 1` features plus the decision)
/// with exactly `floor(missing_rate * m * (n - 1))` missing feature cells
/// placed completely at random. The decision column is never masked.
///
/// Feature 0 is real-valued and shifted by class so learners beat chance;
/// remaining features cycle through categorical, integer and real noise.
/// Classes are balanced. Output is byte-identical for a fixed seed.
pub fn generate_synthetic(m: usize, n: usize, missing_rate: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..1.0).contains(&missing_rate) {
        return Err(Error::InvalidArgument(format!(
            "missing rate must be in [0, 1), got {missing_rate}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 columns (one feature plus the decision), got {n}"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 records, got {m}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = n - 1;

    let mut schema = Vec::with_capacity(n);
    for j in 0..features {
        let kind = if j == 0 {
            AttributeKind::Real
        } else {
            match (j - 1) % 3 {
                0 => AttributeKind::Categorical,
                1 => AttributeKind::Integer,
                _ => AttributeKind::Real,
            }
        };
        schema.push(AttributeSchema::new(format!("f{j}"), kind));
    }
    schema.push(AttributeSchema::new("class", AttributeKind::Decision));

    // Balanced labels, shuffled so class blocks do not line up with row order.
    let mut labels: Vec<&str> = (0..m).map(|i| if i < m / 2 { "0" } else { "1" }).collect();
    labels.shuffle(&mut rng);

    let mut rows = Vec::with_capacity(m);
    for label in &labels {
        let mut row = Vec::with_capacity(n);
        for (j, col) in schema.iter().take(features).enumerate() {
            let cell = match col.kind {
                AttributeKind::Real if j == 0 => {
                    // Class-shifted but overlapping: informative, not separable.
                    let center = if *label == "1" { 1.5 } else { -1.5 };
                    Cell::Real(center + normal(&mut rng))
                }
                AttributeKind::Real => Cell::Real(normal(&mut rng)),
                AttributeKind::Integer => Cell::Integer(rng.gen_range(0..10)),
                AttributeKind::Categorical => {
                    Cell::Categorical(CATEGORY_LABELS[rng.gen_range(0..4)].to_string())
                }
                AttributeKind::Decision => unreachable!(),
            };
            row.push(cell);
        }
        row.push(Cell::Categorical(label.to_string()));
        rows.push(row);
    }

    let target = (missing_rate * (m * features) as f64).floor() as usize;
    for pos in rand::seq::index::sample(&mut rng, m * features, target) {
        rows[pos / features][pos % features] = Cell::Missing;
    }

    Dataset::new(schema, rows)
}

/// Standard normal via Box-Muller; two uniform draws per sample keep the
/// stream layout independent of rejection behavior.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_zero_has_no_missing() {
        let ds = generate_synthetic(100, 5, 0.0, 7).unwrap();
        assert_eq!(ds.missing_count(), 0);
        assert_eq!(ds.n_rows(), 100);
        assert_eq!(ds.n_columns(), 5);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = generate_synthetic(100, 5, 0.1, 7).unwrap();
        let b = generate_synthetic(100, 5, 0.1, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(100, 5, 0.1, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn missing_count_matches_floor_expression() {
        let ds = generate_synthetic(100, 5, 0.1, 7).unwrap();
        assert_eq!(ds.missing_count(), 40); // floor(0.1 * 100 * 4)
        for (m, n, rate) in [(50, 4, 0.25), (33, 7, 0.17), (10, 2, 0.9)] {
            let ds = generate_synthetic(m, n, rate, 3).unwrap();
            let expect = (rate * (m * (n - 1)) as f64).floor() as usize;
            assert_eq!(ds.missing_count(), expect, "m={m} n={n} rate={rate}");
        }
    }

    #[test]
    fn decision_column_never_missing_and_two_classes() {
        let ds = generate_synthetic(40, 6, 0.5, 11).unwrap();
        for i in 0..ds.n_rows() {
            assert!(!ds.cell(i, ds.decision_index()).is_missing());
        }
        assert_eq!(ds.class_labels().len(), 2);
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(generate_synthetic(10, 3, 1.0, 1).is_err());
        assert!(generate_synthetic(10, 3, -0.1, 1).is_err());
        assert!(generate_synthetic(10, 1, 0.0, 1).is_err());
    }
}
