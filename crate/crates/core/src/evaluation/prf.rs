use super::EvalError;
use crate::identifiers::IdentificationResult;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    pub fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// Precision, recall and F1 as percentages, kept at full precision.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(flatten)]
    pub counts: Counts,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

/// Harmonic mean; 0 when both inputs are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Rounds half away from zero to two decimals.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

impl Prf {
    pub fn from_counts(counts: Counts) -> Self {
        let precision = ratio(counts.tp, counts.tp + counts.fp);
        let recall = ratio(counts.tp, counts.tp + counts.fn_);
        Prf {
            precision,
            recall,
            f1: f1_score(precision, recall),
            counts,
        }
    }

    /// A row known only by its scores, e.g. copied from a published table.
    pub fn from_scores(precision: f64, recall: f64, f1: f64) -> Self {
        Prf {
            precision,
            recall,
            f1,
            counts: Counts::default(),
        }
    }
}

/// Unweighted means computed independently for P, R and F1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroAvg {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn macro_average<'a>(rows: impl IntoIterator<Item = &'a Prf>) -> Option<MacroAvg> {
    let rows: Vec<&Prf> = rows.into_iter().collect();
    if rows.is_empty() {
        return None;
    }
    let n = rows.len() as f64;
    let mean = |f: fn(&Prf) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
    Some(MacroAvg {
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f1: mean(|r| r.f1),
    })
}

/// Position-level scoring of abbreviation flags.
pub fn score_identification(pred: &IdentificationResult, gold: &[bool]) -> Result<Prf, EvalError> {
    if pred.flags.len() != gold.len() {
        return Err(EvalError::MisalignedStreams {
            pred: pred.flags.len(),
            gold: gold.len(),
        });
    }
    let mut c = Counts::default();
    for (&p, &g) in pred.flags.iter().zip(gold) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(Prf::from_counts(c))
}
