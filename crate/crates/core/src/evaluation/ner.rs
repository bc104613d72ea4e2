use super::prf::{macro_average, Counts, MacroAvg, Prf};
use super::EvalError;
use crate::corpus::{Document, Sentence, OUTSIDE};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Entity span over token positions, `end` exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

fn parse_tag(tag: &str) -> Option<(bool, &str)> {
    let (prefix, label) = tag.split_once('-')?;
    if label.is_empty() {
        return None;
    }
    match prefix {
        "B" => Some((true, label)),
        "I" => Some((false, label)),
        _ => None,
    }
}

/// Spans from IOB tags. An `I-X` that does not continue an open `X` span
/// starts a new one; anything that is not a B/I tag closes the open span.
pub fn extract_spans<S: AsRef<str>>(tags: &[S]) -> BTreeSet<Span> {
    let mut spans = BTreeSet::new();
    let mut open: Option<(String, usize)> = None;
    for (i, tag) in tags.iter().enumerate() {
        match parse_tag(tag.as_ref()) {
            Some((false, label)) if open.as_ref().is_some_and(|(l, _)| l == label) => {}
            Some((_, label)) => {
                if let Some((l, s)) = open.take() {
                    spans.insert(Span { label: l, start: s, end: i });
                }
                open = Some((label.to_string(), i));
            }
            None => {
                if let Some((l, s)) = open.take() {
                    spans.insert(Span { label: l, start: s, end: i });
                }
            }
        }
    }
    if let Some((l, s)) = open {
        spans.insert(Span { label: l, start: s, end: tags.len() });
    }
    spans
}

/// Canonical IOB encoding of non-overlapping spans.
pub fn spans_to_tags(spans: &BTreeSet<Span>, len: usize) -> Vec<String> {
    let mut tags = vec![OUTSIDE.to_string(); len];
    for s in spans {
        for (k, tag) in tags.iter_mut().enumerate().take(s.end).skip(s.start) {
            *tag = format!("{}-{}", if k == s.start { "B" } else { "I" }, s.label);
        }
    }
    tags
}

/// Exact-match span counts per label for one sentence pair.
pub fn ner_counts<S: AsRef<str>>(pred: &[S], gold: &[S]) -> BTreeMap<String, Counts> {
    let p = extract_spans(pred);
    let g = extract_spans(gold);
    let mut out: BTreeMap<String, Counts> = BTreeMap::new();
    for s in &p {
        let c = out.entry(s.label.clone()).or_default();
        if g.contains(s) {
            c.tp += 1;
        } else {
            c.fp += 1;
        }
    }
    for s in g.difference(&p) {
        out.entry(s.label.clone()).or_default().fn_ += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerReport {
    pub per_class: BTreeMap<String, Prf>,
    #[serde(rename = "macro_avg")]
    pub macro_avg: Option<MacroAvg>,
}

impl NerReport {
    /// Macro average over every listed class. Classes only enter the map
    /// when they have gold support or predictions.
    pub fn from_per_class(per_class: BTreeMap<String, Prf>) -> Self {
        let macro_avg = macro_average(per_class.values());
        NerReport { per_class, macro_avg }
    }

    pub fn from_counts(counts: BTreeMap<String, Counts>) -> Self {
        Self::from_per_class(counts.into_iter().map(|(l, c)| (l, Prf::from_counts(c))).collect())
    }
}

fn sentence_map(docs: &[Document]) -> BTreeMap<(String, usize), &Sentence> {
    docs.iter()
        .flat_map(|d| &d.sentences)
        .map(|s| (s.key(), s))
        .collect()
}

/// Aligns sentences by `(doc_id, sent_index)` and scores exact span matches.
pub fn score_ner(pred_docs: &[Document], gold_docs: &[Document]) -> Result<NerReport, EvalError> {
    let pred = sentence_map(pred_docs);
    let gold = sentence_map(gold_docs);
    let missing_in_pred: Vec<_> = gold.keys().filter(|k| !pred.contains_key(*k)).cloned().collect();
    let missing_in_gold: Vec<_> = pred.keys().filter(|k| !gold.contains_key(*k)).cloned().collect();
    if !missing_in_pred.is_empty() || !missing_in_gold.is_empty() {
        return Err(EvalError::UnalignedCorpora {
            missing_in_pred,
            missing_in_gold,
        });
    }
    let mut totals: BTreeMap<String, Counts> = BTreeMap::new();
    for (key, g) in &gold {
        let p = pred[key];
        for (label, c) in ner_counts(&p.entity_tags(), &g.entity_tags()) {
            totals.entry(label).or_default().add(c);
        }
    }
    Ok(NerReport::from_counts(totals))
}

/// Replaces every abbreviation surface with its gold expansion.
pub fn substitute_gold_expansions(doc: &Document) -> Result<Document, EvalError> {
    let mut out = doc.clone();
    for s in &mut out.sentences {
        for (position, t) in s.tokens.iter_mut().enumerate() {
            if !t.is_abbr {
                continue;
            }
            let Some(expansion) = t.gold_expansion.take() else {
                return Err(EvalError::MissingGoldExpansion {
                    doc_id: s.doc_id.clone(),
                    sent_index: s.sent_index,
                    position,
                });
            };
            t.surface = expansion;
            t.is_abbr = false;
        }
    }
    out.refresh_raw_text();
    Ok(out)
}
