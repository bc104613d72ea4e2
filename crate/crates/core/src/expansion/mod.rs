//! In-context expansion: mask the abbreviation, ask a fill-mask provider
//! for candidates, and accept the best-ranked candidate among the top k
//! that starts with the abbreviation's first letter.

mod document;
mod ngram;
mod policy;
mod remote;

pub use document::{expand_document, Action, ExpansionLog, LogEntry};
pub use ngram::{InterpolationWeights, NgramContextModel};
pub use policy::{expand_candidate, first_letter, select_expansion, Expansion, ExpansionPolicy, MatchRule, NoMatch};
pub use remote::HttpFillMask;

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error("fill-mask provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("fill-mask provider protocol error: {0}")]
    ProviderProtocol(String),
    #[error("fill-mask model has an empty vocabulary")]
    EmptyVocabulary,
    #[error("mask index {index} out of range for {len} tokens")]
    MaskOutOfRange { index: usize, len: usize },
    #[error("top_k must be at least 1")]
    InvalidTopK,
    #[error("{flags} flags for {tokens} dirty tokens")]
    MisalignedFlags { flags: usize, tokens: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillCandidate {
    pub token: String,
    pub score: f64,
}

impl FillCandidate {
    pub fn new(token: impl Into<String>, score: f64) -> Self {
        FillCandidate {
            token: token.into(),
            score,
        }
    }
}

/// Predicts candidates for the masked slot `tokens[mask_index]`. The
/// content of the masked slot must be ignored by implementations.
pub trait FillMaskProvider {
    fn fill_mask(&self, tokens: &[String], mask_index: usize, top_k: usize) -> Result<Vec<FillCandidate>, ExpansionError>;
}

/// Descending score, ties broken by token.
pub(crate) fn rank_order(a: &FillCandidate, b: &FillCandidate) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.token.cmp(&b.token))
}

/// Validates the request, queries `provider`, and normalizes its answer:
/// sorted by descending score (ties by token), deduplicated, at most `top_k`.
pub fn fill_mask(
    provider: &dyn FillMaskProvider,
    tokens: &[String],
    mask_index: usize,
    top_k: usize,
) -> Result<Vec<FillCandidate>, ExpansionError> {
    if top_k == 0 {
        return Err(ExpansionError::InvalidTopK);
    }
    if mask_index >= tokens.len() {
        return Err(ExpansionError::MaskOutOfRange {
            index: mask_index,
            len: tokens.len(),
        });
    }
    let mut candidates = provider.fill_mask(tokens, mask_index, top_k)?;
    if let Some(bad) = candidates.iter().find(|c| !c.score.is_finite()) {
        return Err(ExpansionError::ProviderProtocol(format!(
            "non-finite score for {:?}",
            bad.token
        )));
    }
    candidates.sort_by(rank_order);
    let mut seen = std::collections::HashSet::new();
    candidates.retain(|c| seen.insert(c.token.clone()));
    candidates.truncate(top_k);
    Ok(candidates)
}
