use super::Sentence;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// How abbreviation surfaces are keyed when counting unique types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TypeKey {
    /// Exact surface, trailing stop included, case-sensitive.
    #[default]
    Exact,
    Lowercase,
}

impl TypeKey {
    pub fn key(&self, surface: &str) -> String {
        match self {
            TypeKey::Exact => surface.to_string(),
            TypeKey::Lowercase => surface.to_lowercase(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_sentences: usize,
    pub n_abbr_instances: usize,
    pub n_unique_abbr: usize,
    /// Types absent from the training split; `None` for the total row.
    pub n_unseen_vs_train: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStats {
    pub split: String,
    pub stats: CorpusStats,
}

fn abbr_types(sentences: &[Sentence], key: TypeKey) -> BTreeSet<String> {
    sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .filter(|t| t.is_abbr)
        .map(|t| key.key(&t.surface))
        .collect()
}

fn stats_of(sentences: &[Sentence], key: TypeKey, train_types: Option<&BTreeSet<String>>) -> CorpusStats {
    let types = abbr_types(sentences, key);
    CorpusStats {
        n_sentences: sentences.len(),
        n_abbr_instances: sentences
            .iter()
            .flat_map(|s| &s.tokens)
            .filter(|t| t.is_abbr)
            .count(),
        n_unique_abbr: types.len(),
        n_unseen_vs_train: train_types.map(|train| types.difference(train).count()),
    }
}

/// Per-split rows followed by a `total` row. The first split is the
/// training split that unseen types are measured against.
pub fn compute_stats(splits: &[(&str, &[Sentence])], key: TypeKey) -> Vec<SplitStats> {
    let train_types = splits
        .first()
        .map(|(_, s)| abbr_types(s, key))
        .unwrap_or_default();
    let mut rows: Vec<SplitStats> = splits
        .iter()
        .map(|(name, sentences)| SplitStats {
            split: name.to_string(),
            stats: stats_of(sentences, key, Some(&train_types)),
        })
        .collect();
    let all: Vec<Sentence> = splits.iter().flat_map(|(_, s)| s.iter().cloned()).collect();
    rows.push(SplitStats {
        split: "total".to_string(),
        stats: stats_of(&all, key, None),
    });
    rows
}

pub fn format_stats_tsv(rows: &[SplitStats]) -> String {
    let mut out = String::from("split\tsentences\tabbr_instances\tunique_types\tunseen_types\n");
    for r in rows {
        let unseen = r
            .stats
            .n_unseen_vs_train
            .map_or_else(|| "-".to_string(), |u| u.to_string());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.split, r.stats.n_sentences, r.stats.n_abbr_instances, r.stats.n_unique_abbr, unseen
        ));
    }
    out
}
