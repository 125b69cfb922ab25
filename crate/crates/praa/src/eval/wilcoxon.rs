//! Wilcoxon signed-rank test for matched pairs.
//!
//! Zero differences are dropped, tied absolute differences share their
//! average rank, and the statistic is the smaller rank sum. The two-sided
//! p-value is exact (full null distribution of the rank sum) up to 25
//! nonzero pairs, and a tie-corrected normal approximation with continuity
//! correction beyond that.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest pair count for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    pub w_plus: f64,
    pub w_minus: f64,
    /// min(w_plus, w_minus)
    pub statistic: f64,
    /// Nonzero differences retained.
    pub n: usize,
    /// Two-sided p-value.
    pub p_value: f64,
    pub exact: bool,
}

/// Average ranks of `|values|` sorted ascending, ties averaged.
fn average_ranks(abs_diffs: &[f64]) -> Vec<f64> {
    let n = abs_diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| abs_diffs[a].partial_cmp(&abs_diffs[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]] {
            j += 1;
        }
        // positions i..=j hold ranks i+1..=j+1; all get the average
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Exact P(W+ <= statistic) via the null distribution of the positive rank
/// sum: every sign assignment is equally likely, so the distribution is the
/// subset-sum count of the (doubled, hence integral) ranks.
fn exact_p_two_sided(ranks: &[f64], statistic: f64) -> f64 {
    let scaled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = scaled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &scaled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let limit = (2.0 * statistic).round() as usize;
    let below: u64 = counts[..=limit.min(total)].iter().sum();
    let p = 2.0 * below as f64 / 2f64.powi(ranks.len() as i32);
    p.min(1.0)
}

fn approx_p_two_sided(ranks: &[f64], statistic: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // tie correction: subtract sum(t^3 - t)/48 over tie groups
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    if var <= 0.0 {
        return 1.0;
    }
    let z = (statistic - mean + 0.5) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * normal.cdf(z)).min(1.0)
}

pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult> {
    let diffs: Vec<f64> = pairs
        .iter()
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::Stats(
            "all paired differences are zero; the signed-rank test is undefined".into(),
        ));
    }
    let abs_diffs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs_diffs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = diffs.len();
    let w_minus = n as f64 * (n as f64 + 1.0) / 2.0 - w_plus;
    let statistic = w_plus.min(w_minus);
    let exact = n <= EXACT_LIMIT;
    let p_value = if exact {
        exact_p_two_sided(&ranks, statistic)
    } else {
        approx_p_two_sided(&ranks, statistic)
    };
    Ok(WilcoxonResult {
        w_plus,
        w_minus,
        statistic,
        n,
        p_value,
        exact,
    })
}
