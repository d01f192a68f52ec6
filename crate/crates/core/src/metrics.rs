//! Type-inference and value-identification metrics.

use std::collections::BTreeSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::types::DataType;

pub fn overall_accuracy(pred: &[DataType], truth: &[DataType]) -> f64 {
    assert_eq!(pred.len(), truth.len(), "prediction/annotation length mismatch");
    if pred.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / pred.len() as f64
}

/// One-vs-rest Jaccard index `TP / (TP + FP + FN)` for `t`; 1 when `t`
/// appears in neither list.
pub fn jaccard_per_type(pred: &[DataType], truth: &[DataType], t: DataType) -> f64 {
    assert_eq!(pred.len(), truth.len(), "prediction/annotation length mismatch");
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&p, &y) in pred.iter().zip(truth) {
        match (p == t, y == t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    let denom = tp + fp + fneg;
    if denom == 0 {
        1.0
    } else {
        tp as f64 / denom as f64
    }
}

/// `|A ∩ B| / |A ∪ B|`, with two empty sets scoring 1.
pub fn jaccard_sets<T: Ord + Eq + Hash>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Counts indexed `[truth][predicted]` in [`DataType::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<DataType>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(pred: &[DataType], truth: &[DataType]) -> Self {
        let mut counts = vec![vec![0; 5]; 5];
        for (&p, &y) in pred.iter().zip(truth) {
            counts[y.index()][p.index()] += 1;
        }
        Self {
            labels: DataType::ALL.to_vec(),
            counts,
        }
    }

    pub fn row_total(&self, truth: DataType) -> usize {
        self.counts[truth.index()].iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    /// One operating point per distinct score, highest threshold first.
    pub points: Vec<PrPoint>,
    pub average_precision: f64,
    pub positives: usize,
    pub total: usize,
}

/// Precision-recall sweep over pooled `(score, is_positive)` pairs.
///
/// Equal scores form a single operating point. Average precision is
/// `Σ (R_k − R_{k−1}) P_k` starting from zero recall; without positives the
/// recall is undefined and the curve reports zero recall and AP 0.
pub fn pr_curve(scored: &[(f64, bool)]) -> PrCurve {
    let mut sorted: Vec<(f64, bool)> = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let positives = sorted.iter().filter(|(_, l)| *l).count();
    let mut points = Vec::new();
    let (mut tp, mut seen) = (0usize, 0usize);
    let mut ap = 0.0;
    let mut last_recall = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == threshold {
            tp += usize::from(sorted[i].1);
            seen += 1;
            i += 1;
        }
        let precision = tp as f64 / seen as f64;
        let recall = if positives == 0 {
            0.0
        } else {
            tp as f64 / positives as f64
        };
        ap += (recall - last_recall) * precision;
        last_recall = recall;
        points.push(PrPoint {
            threshold,
            precision,
            recall,
        });
    }
    PrCurve {
        points,
        average_precision: ap,
        positives,
        total: sorted.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use DataType::*;

    fn set(v: &[&str]) -> BTreeSet<std::string::String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn accuracy_extremes() {
        let a = [Integer, Categorical, String];
        assert_eq!(overall_accuracy(&a, &a), 1.0);
        assert_eq!(overall_accuracy(&[Date, Date, Date], &a), 0.0);
    }

    #[test]
    fn jaccard_per_type_examples() {
        assert_eq!(jaccard_per_type(&[Integer, Categorical], &[Categorical, Categorical], Categorical), 0.5);
        assert_eq!(jaccard_per_type(&[Integer, Float], &[Integer, Float], Integer), 1.0);
        assert_eq!(jaccard_per_type(&[Integer], &[Integer], Date), 1.0);
    }

    #[test]
    fn jaccard_sets_examples() {
        let a = set(&["0", "1"]);
        let b = set(&["0", "1", "NULL"]);
        assert!((jaccard_sets(&a, &b) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(jaccard_sets(&a, &a), 1.0);
        assert_eq!(jaccard_sets(&a, &set(&["x"])), 0.0);
        assert_eq!(jaccard_sets(&set(&[]), &set(&[])), 1.0);
    }

    #[test]
    fn average_precision_worked_example() {
        let curve = pr_curve(&[(0.9, true), (0.8, false), (0.1, true)]);
        assert!((curve.average_precision - (0.5 + 0.5 * 2.0 / 3.0)).abs() < 1e-12);
        assert_eq!(curve.points.len(), 3);
        let all_pos = pr_curve(&[(0.3, true), (0.7, true)]);
        assert_eq!(all_pos.average_precision, 1.0);
    }

    #[test]
    fn hard_scores_give_two_points() {
        let curve = pr_curve(&[(1.0, true), (0.0, false), (1.0, false), (0.0, true), (0.0, false)]);
        assert_eq!(curve.points.len(), 2);
        assert_eq!(curve.points[1].recall, 1.0);
        assert!((curve.points[1].precision - 0.4).abs() < 1e-15);
    }

    #[test]
    fn tied_scores_collapse() {
        let curve = pr_curve(&[(0.5, true), (0.5, false)]);
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.average_precision, 0.5);
    }

    #[test]
    fn confusion_rows_sum_to_class_counts() {
        let truth = [Integer, Integer, Categorical, String];
        let pred = [Integer, Categorical, Categorical, Categorical];
        let m = ConfusionMatrix::new(&pred, &truth);
        assert_eq!(m.row_total(Integer), 2);
        assert_eq!(m.counts[Integer.index()][Categorical.index()], 1);
        assert_eq!(m.row_total(Date), 0);
    }
}
