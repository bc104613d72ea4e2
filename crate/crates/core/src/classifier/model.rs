//! L2-regularized logistic regression over sparse token features, trained
//! with seeded SGD and dev-F1 epoch selection.

use super::features::extract_features;
use super::report::{SeedRun, TrainReport};
use super::{ClassifierError, TokenScorer};
use crate::evaluation::{score_identification, Prf};
use crate::identifiers::IdentificationResult;
use crate::tokenization::DirtyToken;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const FORMAT_NAME: &str = "abbrx-scorer";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    /// Probabilities strictly above this are positive.
    pub threshold: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            epochs: 5,
            learning_rate: 0.1,
            l2: 1e-4,
            seed: 1,
            threshold: 0.5,
        }
    }
}

pub type Labeled = (DirtyToken, bool);

type SparseVec = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerModel {
    pub vocab: BTreeMap<String, usize>,
    /// Indexed by feature id.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyperparams: Hyperparams,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl ScorerModel {
    pub fn new(vocab: BTreeMap<String, usize>, weights: Vec<f64>, bias: f64, hyperparams: Hyperparams) -> Self {
        assert_eq!(vocab.len(), weights.len(), "one weight per vocabulary entry");
        ScorerModel {
            vocab,
            weights,
            bias,
            hyperparams,
        }
    }

    /// Vocabulary of every feature seen in `tokens`, ids in sorted order.
    pub fn build_vocab<'a>(tokens: impl IntoIterator<Item = &'a DirtyToken>) -> BTreeMap<String, usize> {
        let mut names: Vec<String> = tokens
            .into_iter()
            .flat_map(|t| extract_features(t).named().into_iter().map(|(n, _)| n))
            .collect();
        names.sort();
        names.dedup();
        names.into_iter().enumerate().map(|(i, n)| (n, i)).collect()
    }

    /// Features outside the vocabulary are dropped.
    pub fn encode(&self, token: &DirtyToken) -> SparseVec {
        extract_features(token)
            .named()
            .into_iter()
            .filter_map(|(name, v)| self.vocab.get(&name).map(|&id| (id, v)))
            .collect()
    }

    fn linear(&self, x: &SparseVec) -> f64 {
        self.bias + x.iter().map(|&(j, v)| self.weights[j] * v).sum::<f64>()
    }

    pub fn probability(&self, token: &DirtyToken) -> f64 {
        sigmoid(self.linear(&self.encode(token)))
    }

    pub fn predict(&self, token: &DirtyToken) -> bool {
        self.probability(token) > self.hyperparams.threshold
    }

    /// Mean logistic loss plus `l2/2 * |w|^2`.
    pub fn loss(&self, data: &[Labeled]) -> f64 {
        let n = data.len().max(1) as f64;
        let data_loss: f64 = data
            .iter()
            .map(|(t, y)| {
                let z = self.linear(&self.encode(t));
                softplus(z) - if *y { z } else { 0.0 }
            })
            .sum();
        data_loss / n + 0.5 * self.hyperparams.l2 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Analytic gradient of [`ScorerModel::loss`]: `(d/dw, d/db)`.
    pub fn gradient(&self, data: &[Labeled]) -> (Vec<f64>, f64) {
        let n = data.len().max(1) as f64;
        let mut gw: Vec<f64> = self.weights.iter().map(|w| self.hyperparams.l2 * w).collect();
        let mut gb = 0.0;
        for (t, y) in data {
            let x = self.encode(t);
            let g = (sigmoid(self.linear(&x)) - f64::from(u8::from(*y))) / n;
            for (j, v) in x {
                gw[j] += g * v;
            }
            gb += g;
        }
        (gw, gb)
    }

    /// One full-batch gradient step.
    pub fn gradient_step(&mut self, data: &[Labeled], step: f64) {
        let (gw, gb) = self.gradient(data);
        for (w, g) in self.weights.iter_mut().zip(gw) {
            *w -= step * g;
        }
        self.bias -= step * gb;
    }

    pub fn identify(&self, tokens: &[DirtyToken]) -> IdentificationResult {
        IdentificationResult::new("classifier", tokens.iter().map(|t| self.predict(t)).collect())
    }

    /// Header line with JSON metadata, then `feature\tweight` per line in id order.
    pub fn to_text(&self) -> String {
        let header = serde_json::json!({
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "hyperparams": self.hyperparams,
            "bias": self.bias,
        });
        let mut by_id: Vec<(&String, &usize)> = self.vocab.iter().collect();
        by_id.sort_by_key(|(_, id)| **id);
        let mut out = format!("{header}\n");
        for (name, &id) in by_id {
            out.push_str(&format!("{name}\t{:?}\n", self.weights[id]));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ClassifierError> {
        let err = |line_no: usize, reason: String| ClassifierError::ModelFormat { line_no, reason };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty model file".into()))?;
        let header: serde_json::Value =
            serde_json::from_str(header).map_err(|e| err(1, format!("bad header: {e}")))?;
        if header["format"] != FORMAT_NAME || header["version"] != FORMAT_VERSION {
            return Err(err(1, format!("unsupported format {}", header["format"])));
        }
        let hyperparams: Hyperparams = serde_json::from_value(header["hyperparams"].clone())
            .map_err(|e| err(1, format!("bad hyperparams: {e}")))?;
        let bias = header["bias"]
            .as_f64()
            .ok_or_else(|| err(1, "missing bias".into()))?;
        let mut vocab = BTreeMap::new();
        let mut weights = Vec::new();
        for (i, line) in lines {
            let (name, w) = line
                .rsplit_once('\t')
                .ok_or_else(|| err(i + 1, "expected feature<TAB>weight".into()))?;
            let w: f64 = w.parse().map_err(|_| err(i + 1, format!("bad weight {w:?}")))?;
            if vocab.insert(name.to_string(), weights.len()).is_some() {
                return Err(err(i + 1, format!("duplicate feature {name:?}")));
            }
            weights.push(w);
        }
        Ok(ScorerModel::new(vocab, weights, bias, hyperparams))
    }
}

impl TokenScorer for ScorerModel {
    fn score(&self, token: &DirtyToken) -> Result<f64, ClassifierError> {
        Ok(self.probability(token))
    }
}

fn labels(data: &[Labeled]) -> Vec<bool> {
    data.iter().map(|(_, y)| *y).collect()
}

fn evaluate(model: &ScorerModel, data: &[Labeled]) -> Prf {
    let pred = IdentificationResult::new("classifier", data.iter().map(|(t, _)| model.predict(t)).collect());
    score_identification(&pred, &labels(data)).expect("aligned by construction")
}

/// Trains with SGD for `epochs` passes and returns the snapshot from the
/// epoch with the best dev F1 (earliest on ties). When `dev` is empty the
/// training set is used for selection.
pub fn train_scorer(
    train: &[Labeled],
    dev: &[Labeled],
    hyperparams: Hyperparams,
) -> Result<(ScorerModel, TrainReport), ClassifierError> {
    let (model, run) = train_run(train, dev, None, hyperparams)?;
    Ok((model, TrainReport::from_runs(vec![run])))
}

pub(crate) fn train_run(
    train: &[Labeled],
    dev: &[Labeled],
    test: Option<&[Labeled]>,
    hp: Hyperparams,
) -> Result<(ScorerModel, SeedRun), ClassifierError> {
    let positives = train.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == train.len() {
        return Err(ClassifierError::DegenerateTraining(format!(
            "{positives} positive and {} negative training tokens",
            train.len() - positives
        )));
    }
    if hp.epochs == 0 {
        return Err(ClassifierError::DegenerateTraining("epochs must be at least 1".into()));
    }
    let vocab = ScorerModel::build_vocab(train.iter().map(|(t, _)| t));
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let weights = (0..vocab.len()).map(|_| rng.random_range(-0.01..0.01)).collect();
    let mut model = ScorerModel::new(vocab, weights, 0.0, hp);
    let encoded: Vec<(SparseVec, f64)> = train
        .iter()
        .map(|(t, y)| (model.encode(t), f64::from(u8::from(*y))))
        .collect();
    let selection = if dev.is_empty() { train } else { dev };

    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut epochs = Vec::with_capacity(hp.epochs);
    let mut best: Option<(f64, usize, ScorerModel)> = None;
    for epoch in 1..=hp.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = &encoded[i];
            let g = sigmoid(model.linear(x)) - y;
            for &(j, v) in x {
                let w = &mut model.weights[j];
                *w -= hp.learning_rate * (g * v + hp.l2 * *w);
            }
            model.bias -= hp.learning_rate * g;
        }
        let prf = evaluate(&model, selection);
        if best.as_ref().is_none_or(|(f1, _, _)| prf.f1 > *f1) {
            best = Some((prf.f1, epoch, model.clone()));
        }
        epochs.push(prf);
    }
    let (_, selected_epoch, model) = best.expect("at least one epoch");
    let run = SeedRun {
        seed: hp.seed,
        dev_per_epoch: epochs,
        selected_epoch,
        dev: evaluate(&model, selection),
        test: test.map(|t| evaluate(&model, t)),
    };
    Ok((model, run))
}
