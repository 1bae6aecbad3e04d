use crate::error::{Error, Result};

/// Threshold applied to scores for the accuracy and F1 decisions.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_f1: f64,
    /// `None` when the labels hold a single class
    pub roc_auc: Option<f64>,
}

impl Metrics {
    /// Arithmetic mean; AUC is defined only if every fold defines it.
    pub fn mean(all: &[Metrics]) -> Metrics {
        let n = all.len() as f64;
        let auc: Option<Vec<f64>> = all.iter().map(|m| m.roc_auc).collect();
        Metrics {
            accuracy: all.iter().map(|m| m.accuracy).sum::<f64>() / n,
            macro_f1: all.iter().map(|m| m.macro_f1).sum::<f64>() / n,
            roc_auc: auc.map(|a| a.iter().sum::<f64>() / n),
        }
    }
}

/// Predicted labels: 1 when the score reaches `threshold`.
pub fn predict_labels(scores: &[f64], threshold: f64) -> Vec<u8> {
    scores.iter().map(|&s| (s >= threshold) as u8).collect()
}

pub fn accuracy(y: &[u8], pred: &[u8]) -> f64 {
    y.iter().zip(pred).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
}

/// Mean of the two per-class F1 scores; a class with no true and no
/// predicted members scores 0.
pub fn macro_f1(y: &[u8], pred: &[u8]) -> f64 {
    let f1 = |c: u8| {
        let tp = y.iter().zip(pred).filter(|&(&a, &b)| a == c && b == c).count();
        let fp = y.iter().zip(pred).filter(|&(&a, &b)| a != c && b == c).count();
        let fn_ = y.iter().zip(pred).filter(|&(&a, &b)| a == c && b != c).count();
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    (f1(0) + f1(1)) / 2.0
}

/// Mann-Whitney statistic from average ranks: (concordant + ½·ties) / (P·N).
pub fn roc_auc(y: &[u8], scores: &[f64]) -> Result<f64> {
    if y.len() != scores.len() {
        return Err(Error::Contract("labels and scores differ in length".into()));
    }
    let p = y.iter().filter(|&&l| l == 1).count();
    let n = y.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::Undefined("ROC AUC needs both classes".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Data("NaN score".into()));
    }
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the rank sum of positives keeps tied (half-integer) ranks exact
    let mut twice_rank_sum: u128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // ranks i+1..=j+1, average (i + j + 2) / 2
        let pos_in_tie = idx[i..=j].iter().filter(|&&k| y[k] == 1).count() as u128;
        twice_rank_sum += pos_in_tie * (i + j + 2) as u128;
        i = j + 1;
    }
    let twice_u = twice_rank_sum - (p as u128) * (p as u128 + 1);
    Ok(twice_u as f64 / 2.0 / (p as f64 * n as f64))
}

/// Accuracy and macro-F1 at `threshold`, plus AUC when defined.
pub fn compute_metrics(y: &[u8], scores: &[f64], threshold: f64) -> Result<Metrics> {
    if y.is_empty() || y.len() != scores.len() {
        return Err(Error::Contract(format!(
            "metrics need equal, nonzero lengths (got {} labels, {} scores)",
            y.len(),
            scores.len()
        )));
    }
    let pred = predict_labels(scores, threshold);
    let roc_auc = match roc_auc(y, scores) {
        Ok(a) => Some(a),
        Err(Error::Undefined(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Metrics {
        accuracy: accuracy(y, &pred),
        macro_f1: macro_f1(y, &pred),
        roc_auc,
    })
}
