//! The plain-text markup format: `[[surface]]((expansion))`.
//!
//! Each line holds one sentence; text outside markup is split on whitespace
//! and then leading/trailing punctuation is peeled into separate tokens.
//! Marked abbreviations are trusted verbatim, so their final stop stays
//! attached.

use super::{Document, Sentence, Token};
use crate::tokenization::split_edge_punctuation;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkupError {
    #[error("malformed markup at byte {offset}: {reason}")]
    MalformedMarkup { offset: usize, reason: &'static str },
}

impl MarkupError {
    pub fn offset(&self) -> usize {
        match self {
            MarkupError::MalformedMarkup { offset, .. } => *offset,
        }
    }
}

const MARKERS: [&str; 4] = ["[[", "]]", "((", "))"];

enum Piece<'a> {
    Plain(&'a str),
    Abbr { surface: &'a str, expansion: &'a str },
}

fn malformed(offset: usize, reason: &'static str) -> MarkupError {
    MarkupError::MalformedMarkup { offset, reason }
}

/// First occurrence of any bracket marker in `text[from..to]`.
fn find_marker(text: &str, from: usize, to: usize) -> Option<(usize, &'static str)> {
    MARKERS
        .iter()
        .filter_map(|m| text[from..to].find(m).map(|i| (from + i, *m)))
        .min_by_key(|(i, _)| *i)
}

fn split_pieces(text: &str) -> Result<Vec<Piece<'_>>, MarkupError> {
    let mut pieces = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let Some((open, marker)) = find_marker(text, pos, text.len()) else {
            pieces.push(Piece::Plain(&text[pos..]));
            break;
        };
        if marker != "[[" {
            return Err(malformed(open, "bracket without a preceding `[[`"));
        }
        if open > pos {
            pieces.push(Piece::Plain(&text[pos..open]));
        }
        let surface_start = open + 2;
        let close = text[surface_start..]
            .find("]]")
            .map(|i| surface_start + i)
            .ok_or_else(|| malformed(open, "unterminated `[[`"))?;
        if let Some((at, _)) = find_marker(text, surface_start, close) {
            return Err(malformed(at, "nested bracket inside `[[...]]`"));
        }
        if close == surface_start {
            return Err(malformed(open, "empty abbreviation surface"));
        }
        let exp_open = close + 2;
        if !text[exp_open..].starts_with("((") {
            return Err(malformed(exp_open, "`]]` not immediately followed by `((`"));
        }
        let exp_start = exp_open + 2;
        let exp_close = text[exp_start..]
            .find("))")
            .map(|i| exp_start + i)
            .ok_or_else(|| malformed(exp_open, "unterminated `((`"))?;
        if let Some((at, _)) = find_marker(text, exp_start, exp_close) {
            return Err(malformed(at, "nested bracket inside `((...))`"));
        }
        pieces.push(Piece::Abbr {
            surface: &text[surface_start..close],
            expansion: &text[exp_start..exp_close],
        });
        pos = exp_close + 2;
    }
    Ok(pieces)
}

struct Builder {
    doc_id: String,
    leading: String,
    sentences: Vec<Sentence>,
    current: Vec<Token>,
}

impl Builder {
    fn push_token(&mut self, token: Token) {
        self.current.push(token);
    }

    fn push_space(&mut self, ws: &str) {
        match self.current.last_mut() {
            Some(last) => last.space_after.push_str(ws),
            None => match self.sentences.last_mut() {
                Some(prev) => prev
                    .tokens
                    .last_mut()
                    .expect("sentences are non-empty")
                    .space_after
                    .push_str(ws),
                None => self.leading.push_str(ws),
            },
        }
        if ws.contains('\n') {
            self.close_sentence();
        }
    }

    fn close_sentence(&mut self) {
        if self.current.is_empty() {
            return;
        }
        let idx = self.sentences.len();
        let tokens = std::mem::take(&mut self.current);
        self.sentences.push(Sentence::new(self.doc_id.clone(), idx, tokens));
    }

    fn plain(&mut self, text: &str) {
        let mut rest = text;
        while !rest.is_empty() {
            let ws_len = rest
                .char_indices()
                .find(|(_, c)| !c.is_whitespace())
                .map_or(rest.len(), |(i, _)| i);
            if ws_len > 0 {
                self.push_space(&rest[..ws_len]);
                rest = &rest[ws_len..];
                continue;
            }
            let chunk_len = rest
                .char_indices()
                .find(|(_, c)| c.is_whitespace())
                .map_or(rest.len(), |(i, _)| i);
            for part in split_edge_punctuation(&rest[..chunk_len]) {
                self.push_token(Token::word(part).glued());
            }
            rest = &rest[chunk_len..];
        }
    }
}

/// Parses one markup file into a document with id `doc_id`.
pub fn parse_markup_text(text: &str, doc_id: &str) -> Result<Document, MarkupError> {
    let pieces = split_pieces(text)?;
    let mut b = Builder {
        doc_id: doc_id.to_string(),
        leading: String::new(),
        sentences: Vec::new(),
        current: Vec::new(),
    };
    for piece in pieces {
        match piece {
            Piece::Plain(s) => b.plain(s),
            Piece::Abbr { surface, expansion } => {
                b.push_token(Token::abbreviation(surface, expansion).glued())
            }
        }
    }
    b.close_sentence();
    Ok(Document::new(doc_id, b.leading, b.sentences))
}

fn render(token: &Token, out: &mut String) {
    if token.is_abbr {
        out.push_str("[[");
        out.push_str(&token.surface);
        out.push_str("]]((");
        out.push_str(token.gold_expansion.as_deref().unwrap_or(""));
        out.push_str("))");
    } else {
        out.push_str(&token.surface);
    }
}

pub fn serialize_markup_text(doc: &Document) -> String {
    let mut out = doc.leading.clone();
    for t in doc.tokens() {
        render(t, &mut out);
        out.push_str(&t.space_after);
    }
    out
}

/// One sentence on one line, without trailing whitespace.
pub fn serialize_markup_sentence(sentence: &Sentence) -> String {
    let mut out = String::new();
    for (i, t) in sentence.tokens.iter().enumerate() {
        render(t, &mut out);
        if i + 1 < sentence.tokens.len() {
            // Line breaks inside a sentence would split it on re-read.
            out.push_str(&t.space_after.replace(['\n', '\r'], " "));
        }
    }
    out
}
