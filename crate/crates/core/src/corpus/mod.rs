//! Corpus data model and the readers/writers for the two supported formats.
//!
//! A [`Document`] stores its tokens together with the whitespace that
//! followed each one, so the original text (`raw_text`) is always the
//! concatenation of `leading` and every `surface + space_after`.

mod conllu;
mod markup;
mod split;
mod stats;

pub use conllu::{
    parse_conllu, parse_conllu_corpus, serialize_conllu, ConlluError, ConlluRow, Stream,
};
pub use markup::{parse_markup_text, serialize_markup_sentence, serialize_markup_text, MarkupError};
pub use split::{split_corpus, SplitError, SplitSpec, SplitUnit, Splits};
pub use stats::{compute_stats, format_stats_tsv, CorpusStats, SplitStats, TypeKey};

use crate::tokenization::{dirty_tokenize, DirtyToken, SentenceRef};
use serde::{Deserialize, Serialize};

pub const OUTSIDE: &str = "O";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub is_abbr: bool,
    pub gold_expansion: Option<String>,
    /// IOB entity label such as `B-PER` or `O`. Unknown labels are kept verbatim.
    pub entity_tag: String,
    pub lemma: Option<String>,
    /// Whitespace between this token and the next one.
    pub space_after: String,
    /// Original CoNLL-U columns, when the token was read from CoNLL-U.
    pub conllu: Option<ConlluRow>,
}

impl Token {
    pub fn word(surface: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            is_abbr: false,
            gold_expansion: None,
            entity_tag: OUTSIDE.to_string(),
            lemma: None,
            space_after: " ".to_string(),
            conllu: None,
        }
    }

    pub fn abbreviation(surface: impl Into<String>, expansion: impl Into<String>) -> Self {
        Token {
            is_abbr: true,
            gold_expansion: Some(expansion.into()),
            ..Token::word(surface)
        }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.entity_tag = tag.into();
        self
    }

    pub fn glued(mut self) -> Self {
        self.space_after.clear();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: String,
    pub sent_index: usize,
    pub tokens: Vec<Token>,
    /// Comment lines (including the leading `#`) preceding the sentence.
    pub comments: Vec<String>,
    /// CoNLL-U multiword/empty-node lines, keyed by the token index they precede.
    pub extra_lines: Vec<(usize, String)>,
}

impl Sentence {
    pub fn new(doc_id: impl Into<String>, sent_index: usize, tokens: Vec<Token>) -> Self {
        Sentence {
            doc_id: doc_id.into(),
            sent_index,
            tokens,
            comments: Vec::new(),
            extra_lines: Vec::new(),
        }
    }

    /// Detokenized sentence text, without the whitespace after the last token.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            out.push_str(&t.surface);
            if i + 1 < self.tokens.len() {
                out.push_str(&t.space_after);
            }
        }
        out
    }

    pub fn entity_tags(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.entity_tag.as_str()).collect()
    }

    pub fn key(&self) -> (String, usize) {
        (self.doc_id.clone(), self.sent_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    /// Whitespace preceding the first token.
    pub leading: String,
    pub sentences: Vec<Sentence>,
    pub raw_text: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, leading: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        let mut doc = Document {
            doc_id: doc_id.into(),
            leading: leading.into(),
            sentences,
            raw_text: String::new(),
        };
        doc.raw_text = doc.detokenize();
        doc
    }

    /// Builds a document from sentences, each ending with a newline.
    pub fn from_sentences(doc_id: impl Into<String>, mut sentences: Vec<Sentence>) -> Self {
        for s in &mut sentences {
            if let Some(last) = s.tokens.last_mut() {
                if !last.space_after.contains('\n') {
                    last.space_after = "\n".to_string();
                }
            }
        }
        Document::new(doc_id, "", sentences)
    }

    pub fn refresh_raw_text(&mut self) {
        self.raw_text = self.detokenize();
    }

    fn detokenize(&self) -> String {
        let mut out = self.leading.clone();
        for t in self.sentences.iter().flat_map(|s| &s.tokens) {
            out.push_str(&t.surface);
            out.push_str(&t.space_after);
        }
        out
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| &s.tokens)
    }

    /// Byte span of every token in `raw_text`, grouped by sentence.
    pub fn token_spans(&self) -> Vec<Vec<(usize, usize)>> {
        let mut pos = self.leading.len();
        self.sentences
            .iter()
            .map(|s| {
                s.tokens
                    .iter()
                    .map(|t| {
                        let span = (pos, pos + t.surface.len());
                        pos = span.1 + t.space_after.len();
                        span
                    })
                    .collect()
            })
            .collect()
    }

    /// Dirty tokens of `raw_text`, each tagged with its sentence and the
    /// position within that sentence.
    pub fn dirty_tokens(&self) -> Vec<DirtyToken> {
        let spans = self.token_spans();
        let starts: Vec<(usize, usize)> = spans
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.first().map(|x| (x.0, i)))
            .collect();
        let mut tokens = dirty_tokenize(&self.raw_text);
        let mut positions = vec![0usize; self.sentences.len()];
        for tok in &mut tokens {
            // Last sentence starting at or before the token.
            let k = starts.partition_point(|&(s, _)| s <= tok.starts_at);
            let idx = if k == 0 { starts.first().map_or(0, |x| x.1) } else { starts[k - 1].1 };
            if let Some(sentence) = self.sentences.get(idx) {
                tok.sentence_ref = Some(SentenceRef {
                    doc_id: self.doc_id.clone(),
                    sent_index: sentence.sent_index,
                    position: positions[idx],
                });
                positions[idx] += 1;
            }
        }
        tokens
    }

    /// Gold abbreviation flag per dirty token: a dirty token is positive when
    /// it overlaps any token annotated as an abbreviation.
    pub fn gold_dirty_flags(&self) -> Vec<bool> {
        let abbr_spans: Vec<(usize, usize)> = self
            .token_spans()
            .into_iter()
            .zip(&self.sentences)
            .flat_map(|(spans, s)| {
                spans
                    .into_iter()
                    .zip(&s.tokens)
                    .filter(|(_, t)| t.is_abbr)
                    .map(|(span, _)| span)
                    .collect::<Vec<_>>()
            })
            .collect();
        self.dirty_tokens()
            .iter()
            .map(|d| {
                abbr_spans
                    .iter()
                    .any(|&(s, e)| s < d.ends_at() && d.starts_at < e)
            })
            .collect()
    }
}

/// Cheap check used by CLI input detection.
pub fn looks_like_conllu(text: &str) -> bool {
    text.lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.split('\t').count() == 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> Document {
        parse_markup_text("Rojen [[l.]]((leta)) 1881 v Trstu.\n([[gl.]]((glej)) spodaj)\n", "d1")
            .unwrap()
    }

    #[test]
    fn raw_text_is_abbreviated_stream() {
        assert_eq!(doc().raw_text, "Rojen l. 1881 v Trstu.\n(gl. spodaj)\n");
    }

    #[test]
    fn dirty_tokens_carry_sentence_positions() {
        let d = doc();
        let toks = d.dirty_tokens();
        let refs: Vec<_> = toks
            .iter()
            .map(|t| {
                let r = t.sentence_ref.as_ref().unwrap();
                (r.sent_index, r.position)
            })
            .collect();
        assert_eq!(refs, vec![(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (1, 0), (1, 1)]);
    }

    #[test]
    fn gold_flags_follow_overlap() {
        assert_eq!(
            doc().gold_dirty_flags(),
            vec![false, true, false, false, false, true, false]
        );
    }

    #[test]
    fn token_spans_index_raw_text() {
        let d = doc();
        for (s, spans) in d.sentences.iter().zip(d.token_spans()) {
            for (t, (a, b)) in s.tokens.iter().zip(spans) {
                assert_eq!(&d.raw_text[a..b], t.surface);
            }
        }
    }
}
