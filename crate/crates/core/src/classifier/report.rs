use super::model::{train_run, Hyperparams, Labeled, ScorerModel};
use super::ClassifierError;
use crate::evaluation::Prf;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

pub fn mean_std(values: &[f64]) -> Option<MeanStd> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Some(MeanStd { mean, std: var.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfSummary {
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
}

impl PrfSummary {
    pub fn over(rows: &[Prf]) -> Option<Self> {
        let col = |f: fn(&Prf) -> f64| mean_std(&rows.iter().map(f).collect::<Vec<_>>());
        Some(PrfSummary {
            precision: col(|p| p.precision)?,
            recall: col(|p| p.recall)?,
            f1: col(|p| p.f1)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub dev_per_epoch: Vec<Prf>,
    /// 1-based epoch whose snapshot was kept.
    pub selected_epoch: usize,
    pub dev: Prf,
    pub test: Option<Prf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub seeds: Vec<u64>,
    pub runs: Vec<SeedRun>,
    pub dev: Option<PrfSummary>,
    pub test: Option<PrfSummary>,
}

impl TrainReport {
    pub fn from_runs(runs: Vec<SeedRun>) -> Self {
        let dev: Vec<Prf> = runs.iter().map(|r| r.dev).collect();
        let test: Option<Vec<Prf>> = runs.iter().map(|r| r.test).collect();
        TrainReport {
            seeds: runs.iter().map(|r| r.seed).collect(),
            dev: PrfSummary::over(&dev),
            test: test.and_then(|t| PrfSummary::over(&t)),
            runs,
        }
    }

    /// One row per seed followed by `mean` and `std` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "seed\tselected_epoch\tdev_p\tdev_r\tdev_f1\ttest_p\ttest_r\ttest_f1\n",
        );
        let fmt = |p: Option<f64>| p.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        for r in &self.runs {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.seed,
                r.selected_epoch,
                fmt(Some(r.dev.precision)),
                fmt(Some(r.dev.recall)),
                fmt(Some(r.dev.f1)),
                fmt(r.test.map(|t| t.precision)),
                fmt(r.test.map(|t| t.recall)),
                fmt(r.test.map(|t| t.f1)),
            ));
        }
        for (name, pick) in [("mean", true), ("std", false)] {
            let get = |s: Option<&PrfSummary>, f: fn(&PrfSummary) -> MeanStd| {
                fmt(s.map(|s| {
                    let m = f(s);
                    if pick { m.mean } else { m.std }
                }))
            };
            out.push_str(&format!(
                "{name}\t-\t{}\t{}\t{}\t{}\t{}\t{}\n",
                get(self.dev.as_ref(), |s| s.precision),
                get(self.dev.as_ref(), |s| s.recall),
                get(self.dev.as_ref(), |s| s.f1),
                get(self.test.as_ref(), |s| s.precision),
                get(self.test.as_ref(), |s| s.recall),
                get(self.test.as_ref(), |s| s.f1),
            ));
        }
        out
    }
}

/// Trains once per seed, evaluates each selected model on dev and test,
/// and summarizes across seeds. The first error aborts the protocol.
pub fn multi_seed_protocol(
    seeds: &[u64],
    train: &[Labeled],
    dev: &[Labeled],
    test: Option<&[Labeled]>,
    base: Hyperparams,
) -> Result<(Vec<ScorerModel>, TrainReport), ClassifierError> {
    if seeds.is_empty() {
        return Err(ClassifierError::NoSeeds);
    }
    let mut models = Vec::with_capacity(seeds.len());
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (model, run) = train_run(train, dev, test, Hyperparams { seed, ..base })?;
        models.push(model);
        runs.push(run);
    }
    Ok((models, TrainReport::from_runs(runs)))
}
