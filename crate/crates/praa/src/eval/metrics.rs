//! Classification metrics: confusion counts, sensitivity, specificity and
//! the trapezoidal ROC area.

use crate::error::{Error, Result};

/// Confusion counts plus the derived fractions. Sensitivity/specificity are
/// `None` when their denominator is empty; fractions live in [0, 1] and are
/// rendered as percents in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub accuracy: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub auc: Option<f64>,
    pub positive_label: String,
}

impl MetricsReport {
    pub fn render(&self) -> String {
        let pct = |x: f64| format!("{:.2}%", 100.0 * x);
        let opt = |x: Option<f64>| x.map(&pct).unwrap_or_else(|| "n/a".to_string());
        let mut out = format!(
            "positive={} TP={} FP={} TN={} FN={}\naccuracy={} SE={} SP={}",
            self.positive_label,
            self.tp,
            self.fp,
            self.tn,
            self.fn_,
            pct(self.accuracy),
            opt(self.sensitivity),
            opt(self.specificity),
        );
        match self.auc {
            Some(auc) => out.push_str(&format!(" AUC={auc:.4}\n")),
            None => out.push_str(" AUC=n/a\n"),
        }
        out
    }

    /// Single CSV line (with header) for machine consumption.
    pub fn render_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_else(|| "n/a".into());
        format!(
            "accuracy,se,sp,auc,tp,fp,tn,fn,positive\n{},{},{},{},{},{},{},{},{}\n",
            self.accuracy,
            opt(self.sensitivity),
            opt(self.specificity),
            opt(self.auc),
            self.tp,
            self.fp,
            self.tn,
            self.fn_,
            self.positive_label,
        )
    }
}

/// Confusion counts and derived fractions; AUC is left unset.
pub fn confusion_metrics(
    actual: &[&str],
    predicted: &[&str],
    positive: &str,
) -> Result<MetricsReport> {
    if actual.len() != predicted.len() {
        return Err(Error::Stats(format!(
            "label lists differ in length: {} vs {}",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::Stats("no labels to score".into()));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (a, p) in actual.iter().zip(predicted) {
        match (*a == positive, *p == positive) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let total = actual.len() as f64;
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    Ok(MetricsReport {
        tp,
        fp,
        tn,
        fn_,
        accuracy: (tp + tn) as f64 / total,
        sensitivity: ratio(tp, tp + fn_),
        specificity: ratio(tn, tn + fp),
        auc: None,
        positive_label: positive.to_string(),
    })
}

/// Area under the ROC curve by threshold sweep with trapezoids, which
/// handles score ties exactly like the rank formulation (ties count half).
pub fn roc_auc(scores: &[f64], labels: &[&str], positive: &str) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Stats(format!(
            "scores and labels differ in length: {} vs {}",
            scores.len(),
            labels.len()
        )));
    }
    let pos_total = labels.iter().filter(|l| **l == positive).count();
    let neg_total = labels.len() - pos_total;
    if pos_total == 0 || neg_total == 0 {
        return Err(Error::Stats(
            "ROC needs both classes present in the labels".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut area = 0.0;
    let (mut tp, mut fp) = (0.0f64, 0.0f64);
    let (mut prev_tp, mut prev_fp) = (0.0f64, 0.0f64);
    let mut prev_score = f64::INFINITY;
    for &i in &order {
        if scores[i] != prev_score {
            area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
            prev_fp = fp;
            prev_tp = tp;
            prev_score = scores[i];
        }
        if labels[i] == positive {
            tp += 1.0;
        } else {
            fp += 1.0;
        }
    }
    area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
    Ok(area / (pos_total as f64 * neg_total as f64))
}
