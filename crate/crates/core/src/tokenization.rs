//! Whitespace "dirty" tokenization.
//!
//! A dirty token is a maximal run of non-whitespace characters with its
//! punctuation still attached. Every identifier in the crate consumes this
//! stream, so offsets always index into the original text.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizationError {
    #[error("token {0:?} does not end with a full stop")]
    NotStopTerminated(String),
}

/// Location of a dirty token inside a parsed document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentenceRef {
    pub doc_id: String,
    pub sent_index: usize,
    /// Index of the dirty token within its sentence.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirtyToken {
    pub raw: String,
    pub clean: String,
    /// Byte offset of `raw` in the tokenized text.
    pub starts_at: usize,
    pub ends_with_stop: bool,
    pub sentence_ref: Option<SentenceRef>,
}

impl DirtyToken {
    pub fn new(raw: &str, starts_at: usize) -> Self {
        let clean = clean_token(raw);
        let ends_with_stop = clean.ends_with('.');
        DirtyToken {
            raw: raw.to_string(),
            clean,
            starts_at,
            ends_with_stop,
            sentence_ref: None,
        }
    }

    /// Byte offset one past the end of `raw`.
    pub fn ends_at(&self) -> usize {
        self.starts_at + self.raw.len()
    }

    /// The cleaned form with one trailing full stop removed, if present.
    pub fn stem(&self) -> &str {
        self.clean.strip_suffix('.').unwrap_or(&self.clean)
    }
}

/// Keeps letters, digits and full stops; everything else is a special character.
pub fn clean_token(raw: &str) -> String {
    raw.chars()
        .filter(|c| c.is_alphanumeric() || *c == '.')
        .collect()
}

/// Splits `text` into maximal non-whitespace runs (Unicode whitespace).
pub fn dirty_tokenize(text: &str) -> Vec<DirtyToken> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(DirtyToken::new(&text[s..i], s));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(DirtyToken::new(&text[s..], s));
    }
    tokens
}

/// Removes exactly the final full stop.
pub fn strip_stop(clean: &str) -> Result<String, TokenizationError> {
    clean
        .strip_suffix('.')
        .map(str::to_string)
        .ok_or_else(|| TokenizationError::NotStopTerminated(clean.to_string()))
}

/// True when `s` contains at least one letter or digit.
pub(crate) fn has_alphanumeric(s: &str) -> bool {
    s.chars().any(char::is_alphanumeric)
}

/// Splits one whitespace-free chunk into a core with leading and trailing
/// punctuation peeled off as single-character tokens. Interior punctuation
/// stays attached to the core.
pub(crate) fn split_edge_punctuation(chunk: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let Some(first) = chunk.find(|c: char| c.is_alphanumeric()) else {
        out.extend(chunk.char_indices().map(|(i, c)| &chunk[i..i + c.len_utf8()]));
        return out;
    };
    let last = chunk
        .char_indices()
        .rfind(|(_, c)| c.is_alphanumeric())
        .map_or(chunk.len(), |(i, c)| i + c.len_utf8());
    out.extend(
        chunk[..first]
            .char_indices()
            .map(|(i, c)| &chunk[i..i + c.len_utf8()]),
    );
    out.push(&chunk[first..last]);
    out.extend(
        chunk[last..]
            .char_indices()
            .map(|(i, c)| &chunk[last + i..last + i + c.len_utf8()]),
    );
    out
}
