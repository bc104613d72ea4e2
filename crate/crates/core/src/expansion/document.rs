use super::policy::{expand_candidate, ExpansionPolicy};
use super::{ExpansionError, FillMaskProvider};
use crate::corpus::{Document, Token};
use crate::identifiers::IdentificationResult;
use crate::tokenization::DirtyToken;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Kept,
    Expanded,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Kept => "kept",
            Action::Expanded => "expanded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub doc_id: String,
    pub sent_index: usize,
    /// Dirty-token position within the sentence.
    pub position: usize,
    pub surface: String,
    pub action: Action,
    pub expansion: Option<String>,
    /// 0-based rank of the accepted candidate.
    pub rank: Option<usize>,
}

/// One entry per flagged dirty token, in document order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpansionLog {
    pub entries: Vec<LogEntry>,
}

impl ExpansionLog {
    pub fn expanded(&self) -> usize {
        self.entries.iter().filter(|e| e.action == Action::Expanded).count()
    }

    pub fn kept(&self) -> usize {
        self.entries.len() - self.expanded()
    }

    pub fn extend(&mut self, other: ExpansionLog) {
        self.entries.extend(other.entries);
    }

    /// Ranks are written 1-based.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("doc_id\tsent_index\tposition\tsurface\taction\texpansion\trank\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                e.doc_id,
                e.sent_index,
                e.position,
                e.surface,
                e.action.as_str(),
                e.expansion.as_deref().unwrap_or("-"),
                e.rank.map_or_else(|| "-".to_string(), |r| (r + 1).to_string()),
            ));
        }
        out
    }
}

/// Byte range inside `raw` that an expansion replaces: from the first
/// alphanumeric character through the last one and any full stops after it.
/// Other surrounding punctuation stays, so `(gl.)` becomes `(glej)`.
fn core_range(raw: &str) -> Option<(usize, usize)> {
    let start = raw.find(|c: char| c.is_alphanumeric())?;
    let (i, c) = raw.char_indices().rfind(|(_, c)| c.is_alphanumeric())?;
    let mut end = i + c.len_utf8();
    end += raw[end..].len() - raw[end..].trim_start_matches('.').len();
    Some((start, end))
}

fn rewrite(raw: &str, expansion: &str) -> Option<String> {
    let (s, e) = core_range(raw)?;
    Some(format!("{}{}{}", &raw[..s], expansion, &raw[e..]))
}

/// Expands every flagged dirty token of `doc`.
///
/// Each abbreviation is masked against the original sentence unless
/// `policy.cascade` is set, in which case earlier expansions in the same
/// sentence are visible to later ones. Tokens touched by a replacement are
/// merged into a single plain token.
pub fn expand_document(
    doc: &Document,
    flags: &IdentificationResult,
    policy: &ExpansionPolicy,
    provider: &dyn FillMaskProvider,
) -> Result<(Document, ExpansionLog), ExpansionError> {
    let dirty = doc.dirty_tokens();
    if dirty.len() != flags.flags.len() {
        return Err(ExpansionError::MisalignedFlags {
            flags: flags.flags.len(),
            tokens: dirty.len(),
        });
    }

    let mut by_sentence: Vec<Vec<&DirtyToken>> = vec![Vec::new(); doc.sentences.len()];
    let index_of: std::collections::HashMap<usize, usize> =
        doc.sentences.iter().enumerate().map(|(i, s)| (s.sent_index, i)).collect();
    for d in &dirty {
        if let Some(&i) = d.sentence_ref.as_ref().and_then(|r| index_of.get(&r.sent_index)) {
            by_sentence[i].push(d);
        }
    }

    let mut log = ExpansionLog::default();
    // (byte start, byte end, replacement) per sentence.
    let mut edits: Vec<Vec<(usize, usize, String)>> = vec![Vec::new(); doc.sentences.len()];
    let mut flag_iter = dirty.iter().zip(&flags.flags);
    for (si, toks) in by_sentence.iter().enumerate() {
        let mut context: Vec<String> = toks.iter().map(|d| d.raw.clone()).collect();
        for (pos, d) in toks.iter().enumerate() {
            let (_, &flag) = flag_iter.next().expect("flags checked against dirty tokens");
            if !flag {
                continue;
            }
            let reference = d.sentence_ref.as_ref().expect("assigned above");
            let mut entry = LogEntry {
                doc_id: reference.doc_id.clone(),
                sent_index: reference.sent_index,
                position: pos,
                surface: d.raw.clone(),
                action: Action::Kept,
                expansion: None,
                rank: None,
            };
            let ctx = if policy.cascade { context.clone() } else { toks.iter().map(|t| t.raw.clone()).collect() };
            if let Some(exp) = expand_candidate(&ctx, pos, policy, provider)? {
                if let (Some((s, e)), Some(new_raw)) = (core_range(&d.raw), rewrite(&d.raw, &exp.token)) {
                    if new_raw != d.raw {
                        edits[si].push((d.starts_at + s, d.starts_at + e, exp.token.clone()));
                        entry.action = Action::Expanded;
                        entry.expansion = Some(exp.token);
                        entry.rank = Some(exp.rank);
                        context[pos] = new_raw;
                    }
                }
            }
            log.entries.push(entry);
        }
    }

    let spans = doc.token_spans();
    let mut out = doc.clone();
    for (si, sentence_edits) in edits.iter().enumerate() {
        let spans = &spans[si];
        let tokens = &mut out.sentences[si].tokens;
        for (rs, re, replacement) in sentence_edits.iter().rev() {
            let touched: Vec<usize> = (0..spans.len())
                .filter(|&i| spans[i].0 < *re && *rs < spans[i].1)
                .collect();
            let (Some(&k), Some(&m)) = (touched.first(), touched.last()) else { continue };
            let (ks, me) = (spans[k].0, spans[m].1);
            let surface = format!(
                "{}{}{}",
                &doc.raw_text[ks..*rs],
                replacement,
                &doc.raw_text[*re..me]
            );
            let mut merged = Token::word(surface);
            merged.entity_tag = tokens[k].entity_tag.clone();
            merged.space_after = tokens[m].space_after.clone();
            tokens.splice(k..=m, [merged]);
        }
    }
    out.refresh_raw_text();
    Ok((out, log))
}
