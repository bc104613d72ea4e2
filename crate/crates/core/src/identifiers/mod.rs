//! Baseline abbreviation identifiers over the dirty-token stream.

mod bigram;
mod dictionary;

pub use bigram::{bigram_identify, bigram_probability, train_bigram, BigramConfig, BigramModel, BigramTokenizer};
pub use dictionary::{dict_identify, CaseMode, DictionaryResource};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentifyError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("{0:?} is not a candidate (it does not occur in both count lists)")]
    NotACandidate(String),
    #[error("probability of {0:?} is undefined: no occurrences")]
    UndefinedProbability(String),
    #[error("results are not aligned: lengths {0:?}")]
    MisalignedResults(Vec<usize>),
    #[error("dictionary {0:?} has no entries")]
    EmptyDictionary(String),
    #[error("model file line {line_no}: {reason}")]
    ModelFormat { line_no: usize, reason: String },
}

/// One decision per dirty token, in stream order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentificationResult {
    pub method: String,
    pub flags: Vec<bool>,
}

impl IdentificationResult {
    pub fn new(method: impl Into<String>, flags: Vec<bool>) -> Self {
        IdentificationResult {
            method: method.into(),
            flags,
        }
    }

    pub fn positives(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }
}

/// Per-token logical OR; method tags are joined with `+`.
pub fn union_identify(results: &[IdentificationResult]) -> Result<IdentificationResult, IdentifyError> {
    let Some(first) = results.first() else {
        return Err(IdentifyError::MisalignedResults(Vec::new()));
    };
    if results.iter().any(|r| r.flags.len() != first.flags.len()) {
        return Err(IdentifyError::MisalignedResults(
            results.iter().map(|r| r.flags.len()).collect(),
        ));
    }
    let flags = (0..first.flags.len())
        .map(|i| results.iter().any(|r| r.flags[i]))
        .collect();
    let method = results
        .iter()
        .map(|r| r.method.as_str())
        .collect::<Vec<_>>()
        .join("+");
    Ok(IdentificationResult { method, flags })
}
