//! Corpus-bigram identifier.
//!
//! Each occurrence of a type is counted in the abbreviation-position list A
//! when the token itself ends in a full stop or the next token is a bare
//! full stop, and in list B otherwise. A type's abbreviation probability is
//! `|A| / (|A| + |B|)`; types at or above the threshold are flagged.

use super::{IdentificationResult, IdentifyError};
use crate::tokenization::{clean_token, split_edge_punctuation, DirtyToken};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigramConfig {
    pub threshold: f64,
    /// Only types seen in both lists are candidates.
    pub require_both: bool,
    pub fold_case: bool,
}

impl Default for BigramConfig {
    fn default() -> Self {
        BigramConfig {
            threshold: DEFAULT_THRESHOLD,
            require_both: true,
            fold_case: false,
        }
    }
}

/// Whitespace split, then leading and trailing punctuation become separate
/// tokens, so `dr. Novak` yields `dr`, `.`, `Novak`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BigramTokenizer;

impl BigramTokenizer {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split_whitespace()
            .flat_map(split_edge_punctuation)
            .map(str::to_string)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigramModel {
    /// Occurrences in abbreviation position; absent means zero.
    pub counts_a: BTreeMap<String, u64>,
    pub counts_b: BTreeMap<String, u64>,
    pub config: BigramConfig,
}

impl BigramModel {
    /// Count key for a token: cleaned, one trailing stop removed, optionally
    /// lowercased. `None` when nothing countable remains.
    pub fn key(&self, token: &str) -> Option<String> {
        key_for(token, self.config.fold_case)
    }

    pub fn count_a(&self, key: &str) -> u64 {
        self.counts_a.get(key).copied().unwrap_or(0)
    }

    pub fn count_b(&self, key: &str) -> u64 {
        self.counts_b.get(key).copied().unwrap_or(0)
    }

    /// TSV `type\tcount_a\tcount_b` sorted by type, after a settings header.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "#threshold={} require_both={}",
            self.config.threshold, self.config.require_both
        );
        if self.config.fold_case {
            out.push_str(" fold_case=true");
        }
        out.push('\n');
        let types: BTreeSet<&String> = self.counts_a.keys().chain(self.counts_b.keys()).collect();
        for t in types {
            out.push_str(&format!("{t}\t{}\t{}\n", self.count_a(t), self.count_b(t)));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, IdentifyError> {
        let err = |line_no: usize, reason: String| IdentifyError::ModelFormat { line_no, reason };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| err(1, "header must start with '#'".into()))?;
        let mut config = BigramConfig::default();
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| err(1, format!("bad header field {field:?}")))?;
            let bad = |_| err(1, format!("bad value in {field:?}"));
            match k {
                "threshold" => config.threshold = v.parse().map_err(|_| err(1, format!("bad value in {field:?}")))?,
                "require_both" => config.require_both = v.parse().map_err(bad)?,
                "fold_case" => config.fold_case = v.parse().map_err(bad)?,
                _ => return Err(err(1, format!("unknown header key {k:?}"))),
            }
        }
        let mut model = BigramModel {
            counts_a: BTreeMap::new(),
            counts_b: BTreeMap::new(),
            config,
        };
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [t, a, b] = cols[..] else {
                return Err(err(i + 1, format!("expected 3 columns, found {}", cols.len())));
            };
            let parse = |v: &str| v.parse::<u64>().map_err(|_| err(i + 1, format!("bad count {v:?}")));
            let (a, b) = (parse(a)?, parse(b)?);
            if a > 0 {
                model.counts_a.insert(t.to_string(), a);
            }
            if b > 0 {
                model.counts_b.insert(t.to_string(), b);
            }
        }
        Ok(model)
    }
}

fn key_for(token: &str, fold_case: bool) -> Option<String> {
    let clean = clean_token(token);
    let stem = clean.strip_suffix('.').unwrap_or(&clean);
    if stem.is_empty() {
        return None;
    }
    Some(if fold_case { stem.to_lowercase() } else { stem.to_string() })
}

/// Counts every token that has a non-empty key into exactly one list.
/// Bare punctuation tokens only act as right context.
pub fn train_bigram(tokens: &[String], config: BigramConfig) -> Result<BigramModel, IdentifyError> {
    let mut model = BigramModel {
        counts_a: BTreeMap::new(),
        counts_b: BTreeMap::new(),
        config,
    };
    let mut counted = 0usize;
    for (i, tok) in tokens.iter().enumerate() {
        let Some(key) = key_for(tok, config.fold_case) else { continue };
        let next_is_stop = tokens.get(i + 1).is_some_and(|n| n == ".");
        let list = if tok.ends_with('.') || next_is_stop {
            &mut model.counts_a
        } else {
            &mut model.counts_b
        };
        *list.entry(key).or_insert(0) += 1;
        counted += 1;
    }
    if counted == 0 {
        return Err(IdentifyError::EmptyCorpus);
    }
    Ok(model)
}

pub fn bigram_probability(model: &BigramModel, token_type: &str) -> Result<f64, IdentifyError> {
    let key = if model.config.fold_case {
        token_type.to_lowercase()
    } else {
        token_type.to_string()
    };
    let (a, b) = (model.count_a(&key), model.count_b(&key));
    if model.config.require_both && (a == 0 || b == 0) {
        return Err(IdentifyError::NotACandidate(key));
    }
    if a + b == 0 {
        return Err(IdentifyError::UndefinedProbability(key));
    }
    Ok(a as f64 / (a + b) as f64)
}

/// Flags a dirty token when its stop-stripped clean form is a candidate
/// whose probability reaches the threshold. The token's own trailing stop is
/// not required.
pub fn bigram_identify(tokens: &[DirtyToken], model: &BigramModel) -> IdentificationResult {
    let flags = tokens
        .iter()
        .map(|t| {
            let stem = t.stem();
            !stem.is_empty()
                && bigram_probability(model, stem).is_ok_and(|p| p >= model.config.threshold)
        })
        .collect();
    IdentificationResult::new("bigram", flags)
}
