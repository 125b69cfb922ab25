//! Shared test oracles: brute-force reimplementations built from first
//! principles, independent of the library's lookup tables and sweeps. Each
//! oracle rescans the raw rows for every query.

#![allow(dead_code)]

use praa::dataset::{AttributeKind, AttributeSchema, Cell, Dataset};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cell_f64(cell: &Cell) -> f64 {
    match cell {
        Cell::Integer(v) => *v as f64,
        Cell::Real(v) => *v,
        other => panic!("expected numeric cell, got {other:?}"),
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Categorical(s) => s.clone(),
        Cell::Integer(v) => v.to_string(),
        other => panic!("expected countable cell, got {other:?}"),
    }
}

fn population_skewness(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / m;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / m;
    if m2 <= 0.0 {
        0.0
    } else {
        m3 / m2.sqrt().powi(3)
    }
}

/// Rows of `data` in the decision class of row `row`.
fn class_rows(data: &Dataset, row: usize) -> Vec<usize> {
    let label = data.decision_label(row);
    (0..data.n_rows())
        .filter(|&r| data.decision_label(r) == label)
        .collect()
}

fn side_count(values: &[f64], skew: f64, v: f64) -> usize {
    if skew >= 0.0 {
        values.iter().filter(|a| **a > v).count()
    } else {
        values.iter().filter(|a| **a <= v).count()
    }
}

/// Per-column index recomputed from scratch: subset cardinalities by direct
/// row scans, skewness by direct formula evaluation. Pairs are oriented by
/// row index (the lower index plays the first record).
pub fn oracle_column_index(data: &Dataset, i: usize, k: usize, l: usize) -> f64 {
    if i == k {
        return 0.0;
    }
    let (i, k) = if i < k { (i, k) } else { (k, i) };
    if data.cell(i, l).is_missing() || data.cell(k, l).is_missing() {
        return 0.0;
    }
    let kind = data.schema()[l].kind;
    let same_class = data.decision_label(i) == data.decision_label(k);
    if same_class {
        let members = class_rows(data, i);
        match kind {
            AttributeKind::Categorical | AttributeKind::Integer => {
                let observed: Vec<String> = members
                    .iter()
                    .filter(|&&r| !data.cell(r, l).is_missing())
                    .map(|&r| cell_text(data.cell(r, l)))
                    .collect();
                let gamma = observed.len() as f64;
                let vi = cell_text(data.cell(i, l));
                let vk = cell_text(data.cell(k, l));
                let p = observed.iter().filter(|v| **v == vi).count() as f64;
                let q = observed.iter().filter(|v| **v == vk).count() as f64;
                (p / gamma).min(q / gamma)
            }
            AttributeKind::Real => {
                let pool: Vec<f64> = members
                    .iter()
                    .filter(|&&r| !data.cell(r, l).is_missing())
                    .map(|&r| cell_f64(data.cell(r, l)))
                    .collect();
                let sk = population_skewness(&pool);
                let tau = side_count(&pool, sk, cell_f64(data.cell(i, l))) as f64;
                let rho = side_count(&pool, sk, cell_f64(data.cell(k, l))) as f64;
                let gamma = pool.len() as f64;
                (tau / gamma).min(rho / gamma)
            }
            AttributeKind::Decision => unreachable!(),
        }
    } else {
        let p_rows = class_rows(data, i);
        let q_rows = class_rows(data, k);
        match kind {
            AttributeKind::Categorical | AttributeKind::Integer => {
                let vi = cell_text(data.cell(i, l));
                let vk = cell_text(data.cell(k, l));
                let beta = p_rows
                    .iter()
                    .filter(|&&r| {
                        !data.cell(r, l).is_missing() && cell_text(data.cell(r, l)) == vi
                    })
                    .count() as f64;
                let delta = q_rows
                    .iter()
                    .filter(|&&r| {
                        !data.cell(r, l).is_missing() && cell_text(data.cell(r, l)) == vk
                    })
                    .count() as f64;
                (beta / (beta + delta)).max(delta / (beta + delta))
            }
            AttributeKind::Real => {
                let p_pool: Vec<f64> = p_rows
                    .iter()
                    .filter(|&&r| !data.cell(r, l).is_missing())
                    .map(|&r| cell_f64(data.cell(r, l)))
                    .collect();
                let q_pool: Vec<f64> = q_rows
                    .iter()
                    .filter(|&&r| !data.cell(r, l).is_missing())
                    .map(|&r| cell_f64(data.cell(r, l)))
                    .collect();
                // Both counting sets are drawn from the first record's class
                // column, directed by that column's skewness sign.
                let sk_p = population_skewness(&p_pool);
                let beta = side_count(&p_pool, sk_p, cell_f64(data.cell(i, l))) as f64;
                let delta = side_count(&p_pool, sk_p, cell_f64(data.cell(k, l))) as f64;
                let lambda = (p_pool.len() + q_pool.len()) as f64;
                (beta / lambda).min(delta / lambda)
            }
            AttributeKind::Decision => unreachable!(),
        }
    }
}

pub fn oracle_distance(data: &Dataset, i: usize, k: usize) -> f64 {
    (0..data.n_features())
        .map(|l| oracle_column_index(data, i, k, l).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn oracle_distance_matrix(data: &Dataset) -> Vec<Vec<f64>> {
    let m = data.n_rows();
    (0..m)
        .map(|i| (0..m).map(|k| oracle_distance(data, i, k)).collect())
        .collect()
}

fn oracle_median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Neighbor rows of `i` by direct evaluation of the deviation rule over a
/// full oracle distance matrix.
pub fn oracle_neighbors(data: &Dataset, i: usize) -> Vec<usize> {
    let others: Vec<usize> = (0..data.n_rows()).filter(|&k| k != i).collect();
    let dists: Vec<f64> = others.iter().map(|&k| oracle_distance(data, i, k)).collect();
    let med = oracle_median(&dists);
    let mad = oracle_median(&dists.iter().map(|d| (d - med).abs()).collect::<Vec<_>>());
    let alpha = |d: f64| {
        if mad <= 0.0 {
            if d <= med {
                0.0
            } else {
                1.0
            }
        } else {
            (d - med) / mad
        }
    };
    let selected: Vec<usize> = others
        .iter()
        .zip(&dists)
        .filter(|(_, &d)| alpha(d) <= 0.0)
        .map(|(&k, _)| k)
        .collect();
    if selected.is_empty() {
        let best = others
            .iter()
            .zip(&dists)
            .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
            .map(|(&k, _)| k)
            .unwrap();
        vec![best]
    } else {
        selected
    }
}

/// Mode fill for cell (i, l) by direct enumeration over the oracle
/// neighbors; ties by smallest donor distance then lowest row index.
pub fn oracle_mode_fill(data: &Dataset, i: usize, l: usize) -> String {
    let neighbors = oracle_neighbors(data, i);
    let donors: Vec<(String, f64, usize)> = neighbors
        .iter()
        .filter(|&&r| !data.cell(r, l).is_missing())
        .map(|&r| (cell_text(data.cell(r, l)), oracle_distance(data, i, r), r))
        .collect();
    assert!(!donors.is_empty(), "oracle fixture must have observing donors");
    let mut best: Option<(String, usize, (f64, usize))> = None;
    for (value, d, row) in &donors {
        let count = donors.iter().filter(|(v, _, _)| v == value).count();
        let key = donors
            .iter()
            .filter(|(v, _, _)| v == value)
            .map(|(_, dd, rr)| (*dd, *rr))
            .fold((f64::INFINITY, usize::MAX), |acc, x| if x < acc { x } else { acc });
        let better = match &best {
            None => true,
            Some((_, bc, bk)) => count > *bc || (count == *bc && key < *bk),
        };
        if better {
            best = Some((value.clone(), count, key));
        }
        let _ = (d, row);
    }
    best.unwrap().0
}

/// AUC by direct positive-negative pair counting: wins plus half-ties over
/// all P*N pairs.
pub fn oracle_auc(scores: &[f64], labels: &[&str], positive: &str) -> f64 {
    let mut wins = 0.0f64;
    let mut pairs = 0.0f64;
    for (sp, lp) in scores.iter().zip(labels) {
        if *lp != positive {
            continue;
        }
        for (sn, ln) in scores.iter().zip(labels) {
            if *ln == positive {
                continue;
            }
            pairs += 1.0;
            if sp > sn {
                wins += 1.0;
            } else if sp == sn {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Exact two-sided signed-rank p-value by full enumeration of the 2^n sign
/// assignments over average ranks.
pub fn oracle_wilcoxon_exact(pairs: &[(f64, f64)]) -> (f64, f64, f64) {
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    assert!(n > 0 && n <= 20, "oracle enumeration is for small n");
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    // average ranks by direct counting
    let ranks: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| **b < *a).count() as f64;
            let equal = abs.iter().filter(|b| **b == *a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| *r)
        .sum();
    let statistic = w_plus.min(w_minus);
    let mut at_or_below = 0u64;
    for signs in 0..(1u64 << n) {
        let w: f64 = (0..n).filter(|i| signs >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= statistic + 1e-12 {
            at_or_below += 1;
        }
    }
    let p = (2.0 * at_or_below as f64 / (1u64 << n) as f64).min(1.0);
    (statistic, p, w_plus)
}

/// Small random mixed-type dataset with two classes guaranteed and MCAR
/// missing feature cells.
pub fn random_mixed_dataset(rng: &mut ChaCha8Rng, max_rows: usize, max_features: usize) -> Dataset {
    let m = rng.gen_range(2..=max_rows.max(2));
    let features = rng.gen_range(1..=max_features.max(1));
    let mut schema: Vec<AttributeSchema> = (0..features)
        .map(|j| {
            let kind = match rng.gen_range(0..3) {
                0 => AttributeKind::Categorical,
                1 => AttributeKind::Integer,
                _ => AttributeKind::Real,
            };
            AttributeSchema::new(format!("c{j}"), kind)
        })
        .collect();
    schema.push(AttributeSchema::new("class", AttributeKind::Decision));

    let labels = ["P", "N"];
    let rows: Vec<Vec<Cell>> = (0..m)
        .map(|i| {
            let mut row: Vec<Cell> = schema[..features]
                .iter()
                .map(|col| {
                    if rng.gen_bool(0.15) {
                        return Cell::Missing;
                    }
                    match col.kind {
                        AttributeKind::Categorical => {
                            Cell::Categorical(["a", "b", "c"][rng.gen_range(0..3)].to_string())
                        }
                        AttributeKind::Integer => Cell::Integer(rng.gen_range(-3..4)),
                        AttributeKind::Real => {
                            Cell::Real((rng.gen_range(-40..40) as f64) / 8.0)
                        }
                        AttributeKind::Decision => unreachable!(),
                    }
                })
                .collect();
            // First two rows pin both classes; the rest are random.
            let label = if i < 2 { labels[i] } else { labels[rng.gen_range(0..2)] };
            row.push(Cell::Categorical(label.to_string()));
            row
        })
        .collect();
    Dataset::new(schema, rows).expect("random dataset is well typed")
}

/// Separable fixture: one perfectly predictive real feature (class "1" in
/// [1, 2], class "0" in [-2, -1]), categorical noise columns, balanced
/// classes, and exactly `floor(rate * m * features)` missing cells.
pub fn separable_fixture(m: usize, noise_columns: usize, missing_rate: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut schema = vec![AttributeSchema::new("risk", AttributeKind::Real)];
    for j in 0..noise_columns {
        schema.push(AttributeSchema::new(
            format!("noise{j}"),
            AttributeKind::Categorical,
        ));
    }
    schema.push(AttributeSchema::new("outcome", AttributeKind::Decision));
    let labels_pool = ["a", "b", "c", "d", "e", "f", "g", "h"];

    let features = noise_columns + 1;
    let mut rows: Vec<Vec<Cell>> = (0..m)
        .map(|i| {
            let positive = i % 2 == 0;
            let mut row = Vec::with_capacity(features + 1);
            let base: f64 = rng.gen();
            row.push(Cell::Real(if positive { 1.0 + base } else { -2.0 + base }));
            for _ in 0..noise_columns {
                row.push(Cell::Categorical(
                    labels_pool[rng.gen_range(0..labels_pool.len())].to_string(),
                ));
            }
            row.push(Cell::Categorical(if positive { "1" } else { "0" }.to_string()));
            row
        })
        .collect();

    let target = (missing_rate * (m * features) as f64).floor() as usize;
    for pos in rand::seq::index::sample(&mut rng, m * features, target) {
        rows[pos / features][pos % features] = Cell::Missing;
    }
    Dataset::new(schema, rows).expect("separable fixture is well typed")
}
