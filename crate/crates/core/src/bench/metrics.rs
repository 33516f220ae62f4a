//! Confusion matrices, hit ratio, CMC curves and document aggregation.

use crate::classify::ScoreVector;
use crate::error::{Error, Result};
use crate::{Script, SCRIPT_COUNT};

/// Sample counts, rows = true script, columns = predicted script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; SCRIPT_COUNT]; SCRIPT_COUNT],
}

impl ConfusionMatrix {
    pub fn counts(&self) -> &[[u64; SCRIPT_COUNT]; SCRIPT_COUNT] {
        &self.counts
    }

    pub fn row_total(&self, truth: Script) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Row-normalized percentage; untested rows are all zero.
    pub fn percent(&self, truth: Script, pred: Script) -> f64 {
        let n = self.row_total(truth);
        if n == 0 {
            0.0
        } else {
            100.0 * self.counts[truth.index()][pred.index()] as f64 / n as f64
        }
    }

    pub fn tested(&self) -> Vec<Script> {
        Script::ALL.into_iter().filter(|&s| self.row_total(s) > 0).collect()
    }
}

pub fn confusion(preds: &[Script], truths: &[Script]) -> Result<ConfusionMatrix> {
    if preds.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            actual: preds.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::InvalidParameter("no predictions".into()));
    }
    let mut counts = [[0u64; SCRIPT_COUNT]; SCRIPT_COUNT];
    for (p, t) in preds.iter().zip(truths) {
        counts[t.index()][p.index()] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Mean diagonal percentage over rows with at least one test sample.
pub fn hit_ratio(cm: &ConfusionMatrix) -> f64 {
    let rows = cm.tested();
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().map(|&s| cm.percent(s, s)).sum::<f64>() / rows.len() as f64
}

/// Diagonal weighted by row size, i.e. overall accuracy in percent.
pub fn weighted_diagonal(cm: &ConfusionMatrix) -> f64 {
    let total = cm.total();
    if total == 0 {
        return 0.0;
    }
    let hits: u64 = Script::ALL.iter().map(|s| cm.counts[s.index()][s.index()]).sum();
    100.0 * hits as f64 / total as f64
}

/// 1 + number of other scripts scoring at least as high as the truth.
pub fn truth_rank(scores: &ScoreVector, truth: Script) -> usize {
    let t = scores.get(truth);
    1 + Script::ALL
        .iter()
        .filter(|&&s| s != truth && scores.get(s) >= t)
        .count()
}

/// Cumulative match curve: entry `k - 1` is the percentage of samples whose
/// truth ranks within the top `k`. Scores may be `-inf` but not NaN.
pub fn cmc(scores: &[ScoreVector], truths: &[Script]) -> Result<[f64; SCRIPT_COUNT]> {
    if scores.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            actual: scores.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::InvalidParameter("no score vectors".into()));
    }
    if scores.iter().any(|s| s.0.iter().any(|v| v.is_nan())) {
        return Err(Error::InvalidParameter("NaN score".into()));
    }
    let mut hist = [0u64; SCRIPT_COUNT];
    for (s, &t) in scores.iter().zip(truths) {
        hist[truth_rank(s, t) - 1] += 1;
    }
    let mut out = [0.0; SCRIPT_COUNT];
    let mut acc = 0u64;
    for k in 0..SCRIPT_COUNT {
        acc += hist[k];
        out[k] = 100.0 * acc as f64 / scores.len() as f64;
    }
    Ok(out)
}

/// Per-script mean of line score vectors.
pub fn aggregate_document(lines: &[ScoreVector]) -> Result<ScoreVector> {
    if lines.is_empty() {
        return Err(Error::InvalidParameter("document has no lines".into()));
    }
    let n = lines.len() as f64;
    Ok(ScoreVector(std::array::from_fn(|i| {
        lines.iter().map(|l| l.0[i]).sum::<f64>() / n
    })))
}
