//! CoNLL-U reader/writer.
//!
//! The last column carries `|`-separated annotations. IOB fields whose label
//! is `ABBR` mark abbreviations; any other IOB field is the entity tag.
//! `key=value` fields are passed through, with `Expan=` holding the gold
//! expansion and `SpaceAfter=No` controlling detokenization.

use super::{Document, Sentence, Token, OUTSIDE};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ABBR_LABEL: &str = "ABBR";
const EXPANSION_KEY: &str = "Expan";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConlluError {
    #[error("line {line_no}: malformed CoNLL-U line ({reason})")]
    MalformedConllu { line_no: usize, reason: String },
    #[error("line {line_no}: cannot parse annotation {field:?}")]
    UnknownIobTag { line_no: usize, field: String },
}

impl ConlluError {
    pub fn line_no(&self) -> usize {
        match self {
            ConlluError::MalformedConllu { line_no, .. } | ConlluError::UnknownIobTag { line_no, .. } => {
                *line_no
            }
        }
    }
}

/// Which text stream a CoNLL-U file encodes. In the expanded stream the
/// `ABBR` tags mark expansion words, which are ordinary tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stream {
    Abbreviated,
    Expanded,
}

/// Columns kept verbatim for re-serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConlluRow {
    pub id: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: String,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

#[derive(Debug, Default, PartialEq)]
struct Annotation {
    entity: Option<String>,
    abbr: bool,
    expansion: Option<String>,
    no_space_after: bool,
    extras: Vec<String>,
}

fn is_iob(field: &str) -> Option<(&str, &str)> {
    let (prefix, label) = field.split_once('-')?;
    matches!(prefix, "B" | "I").then_some((prefix, label)).filter(|(_, l)| !l.is_empty())
}

fn parse_annotation(misc: &str) -> Result<Annotation, String> {
    let mut ann = Annotation::default();
    if misc == "_" {
        return Ok(ann);
    }
    for field in misc.split('|') {
        if let Some((key, value)) = field.split_once('=') {
            match key {
                EXPANSION_KEY => ann.expansion = Some(value.to_string()),
                "SpaceAfter" if value == "No" => ann.no_space_after = true,
                _ => ann.extras.push(field.to_string()),
            }
        } else if field == OUTSIDE {
            ann.entity.get_or_insert_with(|| OUTSIDE.to_string());
        } else if let Some((_, label)) = is_iob(field) {
            if label == ABBR_LABEL {
                ann.abbr = true;
            } else if ann.entity.as_deref().is_some_and(|e| e != OUTSIDE) {
                return Err(field.to_string());
            } else {
                ann.entity = Some(field.to_string());
            }
        } else {
            return Err(field.to_string());
        }
    }
    Ok(ann)
}

fn malformed(line_no: usize, reason: impl Into<String>) -> ConlluError {
    ConlluError::MalformedConllu {
        line_no,
        reason: reason.into(),
    }
}

struct Reader {
    stream: Stream,
    default_doc_id: String,
    docs: Vec<(String, Vec<Sentence>)>,
    comments: Vec<String>,
    extra: Vec<(usize, String)>,
    tokens: Vec<Token>,
}

impl Reader {
    fn current_doc(&mut self) -> &mut (String, Vec<Sentence>) {
        if self.docs.is_empty() {
            self.docs.push((self.default_doc_id.clone(), Vec::new()));
        }
        self.docs.last_mut().unwrap()
    }

    fn flush(&mut self, line_no: usize) -> Result<(), ConlluError> {
        if self.tokens.is_empty() {
            if !self.extra.is_empty() {
                return Err(malformed(line_no, "sentence without word lines"));
            }
            return Ok(());
        }
        let mut tokens = std::mem::take(&mut self.tokens);
        if let Some(last) = tokens.last_mut() {
            last.space_after = "\n".to_string();
        }
        let comments = std::mem::take(&mut self.comments);
        let extra_lines = std::mem::take(&mut self.extra);
        let (doc_id, sentences) = self.current_doc();
        let sentence = Sentence {
            doc_id: doc_id.clone(),
            sent_index: sentences.len(),
            tokens,
            comments,
            extra_lines,
        };
        sentences.push(sentence);
        Ok(())
    }

    fn comment(&mut self, line: &str) {
        if self.tokens.is_empty() {
            if let Some(id) = line
                .strip_prefix('#')
                .map(str::trim_start)
                .and_then(|l| l.strip_prefix("newdoc id"))
                .and_then(|l| l.trim_start().strip_prefix('='))
            {
                let id = id.trim().to_string();
                if self.docs.last().is_some_and(|(_, s)| s.is_empty()) {
                    self.docs.last_mut().unwrap().0 = id;
                } else {
                    self.docs.push((id, Vec::new()));
                }
            }
        }
        self.comments.push(line.to_string());
    }

    fn word(&mut self, line: &str, line_no: usize) -> Result<(), ConlluError> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(malformed(line_no, format!("expected 10 columns, found {}", cols.len())));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            let valid = id
                .split(['-', '.'])
                .all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()));
            if !valid {
                return Err(malformed(line_no, format!("invalid ID {id:?}")));
            }
            self.extra.push((self.tokens.len(), line.to_string()));
            return Ok(());
        }
        if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed(line_no, format!("invalid ID {id:?}")));
        }
        if cols[1].is_empty() {
            return Err(malformed(line_no, "empty FORM"));
        }
        let misc = cols[9];
        let ann = parse_annotation(misc).map_err(|field| ConlluError::UnknownIobTag { line_no, field })?;
        self.tokens.push(Token {
            surface: cols[1].to_string(),
            is_abbr: ann.abbr && self.stream == Stream::Abbreviated,
            gold_expansion: ann.expansion,
            entity_tag: ann.entity.unwrap_or_else(|| OUTSIDE.to_string()),
            lemma: (cols[2] != "_").then(|| cols[2].to_string()),
            space_after: if ann.no_space_after { String::new() } else { " ".to_string() },
            conllu: Some(ConlluRow {
                id: id.to_string(),
                upos: cols[3].to_string(),
                xpos: cols[4].to_string(),
                feats: cols[5].to_string(),
                head: cols[6].to_string(),
                deprel: cols[7].to_string(),
                deps: cols[8].to_string(),
                misc: misc.to_string(),
            }),
        });
        Ok(())
    }
}

/// Parses a CoNLL-U file into one document per `# newdoc id` block.
pub fn parse_conllu_corpus(
    text: &str,
    stream: Stream,
    default_doc_id: &str,
) -> Result<Vec<Document>, ConlluError> {
    let mut r = Reader {
        stream,
        default_doc_id: default_doc_id.to_string(),
        docs: Vec::new(),
        comments: Vec::new(),
        extra: Vec::new(),
        tokens: Vec::new(),
    };
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        if line.trim().is_empty() {
            r.flush(line_no)?;
        } else if line.starts_with('#') {
            r.comment(line);
        } else {
            r.word(line, line_no)?;
        }
    }
    r.flush(last_line + 1)?;
    Ok(r
        .docs
        .into_iter()
        .map(|(id, sentences)| Document::new(id, "", sentences))
        .collect())
}

/// Parses a CoNLL-U file as a single document; the id comes from the first
/// `# newdoc id` comment, defaulting to `doc`.
pub fn parse_conllu(text: &str, stream: Stream) -> Result<Document, ConlluError> {
    let docs = parse_conllu_corpus(text, stream, "doc")?;
    let doc_id = docs.first().map_or_else(|| "doc".to_string(), |d| d.doc_id.clone());
    let mut sentences: Vec<Sentence> = docs.into_iter().flat_map(|d| d.sentences).collect();
    for (i, s) in sentences.iter_mut().enumerate() {
        s.doc_id = doc_id.clone();
        s.sent_index = i;
    }
    Ok(Document::new(doc_id, "", sentences))
}

fn annotation_of(token: &Token, extras: &[String]) -> Annotation {
    Annotation {
        entity: Some(token.entity_tag.clone()),
        abbr: token.is_abbr,
        expansion: token.gold_expansion.clone(),
        no_space_after: token.space_after.is_empty(),
        extras: extras.to_vec(),
    }
}

fn render_misc(ann: &Annotation) -> String {
    let mut fields = vec![ann.entity.clone().unwrap_or_else(|| OUTSIDE.to_string())];
    if ann.abbr {
        fields.push(format!("B-{ABBR_LABEL}"));
    }
    if let Some(e) = &ann.expansion {
        fields.push(format!("{EXPANSION_KEY}={e}"));
    }
    fields.extend(ann.extras.iter().cloned());
    if ann.no_space_after {
        fields.push("SpaceAfter=No".to_string());
    }
    fields.join("|")
}

fn misc_for(token: &Token, is_last: bool) -> String {
    let original = token.conllu.as_ref().map(|r| r.misc.as_str());
    let parsed = original.and_then(|m| parse_annotation(m).ok()).unwrap_or_default();
    let mut current = annotation_of(token, &parsed.extras);
    if is_last {
        // The final token's trailing newline says nothing about SpaceAfter.
        current.no_space_after = parsed.no_space_after;
    }
    let unchanged = original.is_some()
        && parsed.entity.as_deref().unwrap_or(OUTSIDE) == token.entity_tag
        && (parsed.abbr == token.is_abbr || !token.is_abbr)
        && parsed.expansion == token.gold_expansion
        && parsed.no_space_after == current.no_space_after;
    match original {
        Some(m) if unchanged => m.to_string(),
        _ => render_misc(&current),
    }
}

/// Writes documents as CoNLL-U. Rows read from CoNLL-U keep their columns;
/// other tokens get `_` placeholders and sentences without comments get
/// generated `sent_id`/`text` comments.
pub fn serialize_conllu(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        for (si, s) in doc.sentences.iter().enumerate() {
            if s.comments.is_empty() {
                if si == 0 {
                    out.push_str(&format!("# newdoc id = {}\n", doc.doc_id));
                }
                out.push_str(&format!("# sent_id = {}.{}\n", doc.doc_id, s.sent_index + 1));
                out.push_str(&format!("# text = {}\n", s.text().replace('\n', " ")));
            }
            for c in &s.comments {
                out.push_str(c);
                out.push('\n');
            }
            let renumber = s.tokens.iter().any(|t| t.conllu.is_none());
            for (i, t) in s.tokens.iter().enumerate() {
                if !renumber {
                    for (_, line) in s.extra_lines.iter().filter(|(at, _)| *at == i) {
                        out.push_str(line);
                        out.push('\n');
                    }
                }
                let misc = misc_for(t, i + 1 == s.tokens.len());
                let lemma = t.lemma.as_deref().unwrap_or("_");
                let row = match (&t.conllu, renumber) {
                    (Some(r), false) => [
                        r.id.as_str(),
                        &t.surface,
                        lemma,
                        &r.upos,
                        &r.xpos,
                        &r.feats,
                        &r.head,
                        &r.deprel,
                        &r.deps,
                        &misc,
                    ]
                    .join("\t"),
                    _ => [
                        (i + 1).to_string().as_str(),
                        &t.surface,
                        lemma,
                        "_",
                        "_",
                        "_",
                        "_",
                        "_",
                        "_",
                        &misc,
                    ]
                    .join("\t"),
                };
                out.push_str(&row);
                out.push('\n');
            }
            if !renumber {
                for (_, line) in s.extra_lines.iter().filter(|(at, _)| *at >= s.tokens.len()) {
                    out.push_str(line);
                    out.push('\n');
                }
            }
            out.push('\n');
        }
    }
    out
}
