//! Per-token binary abbreviation classifier.
//!
//! Every dirty token is scored on its own, without sentence context. The
//! native scorer is a linear model over character n-grams; [`RemoteScorer`]
//! delegates to an external language-model service instead.

mod features;
mod model;
mod remote;
mod report;

pub use features::{extract_features, TokenFeatures};
pub use model::{sigmoid, train_scorer, Hyperparams, Labeled, ScorerModel};
pub use remote::{remote_score, RemoteScorer};
pub use report::{mean_std, multi_seed_protocol, MeanStd, PrfSummary, SeedRun, TrainReport};

use crate::identifiers::IdentificationResult;
use crate::tokenization::DirtyToken;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),
    #[error("no seeds given")]
    NoSeeds,
    #[error("bridge unavailable: {0}")]
    BridgeUnavailable(String),
    #[error("bridge protocol error: {0}")]
    BridgeProtocolError(String),
    #[error("model file line {line_no}: {reason}")]
    ModelFormat { line_no: usize, reason: String },
}

/// Anything that maps a dirty token to an abbreviation probability.
pub trait TokenScorer {
    fn score(&self, token: &DirtyToken) -> Result<f64, ClassifierError>;
}

/// Thresholds scorer probabilities; ties at the threshold are negative.
pub fn classify_tokens(
    tokens: &[DirtyToken],
    scorer: &dyn TokenScorer,
    threshold: f64,
    method: &str,
) -> Result<IdentificationResult, ClassifierError> {
    let flags = tokens
        .iter()
        .map(|t| scorer.score(t).map(|p| p > threshold))
        .collect::<Result<_, _>>()?;
    Ok(IdentificationResult::new(method, flags))
}

/// Labels dirty tokens with gold flags for training.
pub fn label_tokens(tokens: Vec<DirtyToken>, gold: &[bool]) -> Vec<Labeled> {
    tokens.into_iter().zip(gold.iter().copied()).collect()
}
