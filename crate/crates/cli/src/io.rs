use crate::failure::Failure;
use abbrx::corpus::{looks_like_conllu, parse_conllu_corpus, parse_markup_text, Document, Stream};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Markup,
    Conllu,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markup" => Ok(InputFormat::Markup),
            "conllu" => Ok(InputFormat::Conllu),
            _ => Err(format!("unknown input format {s:?} (markup, conllu)")),
        }
    }
}

pub fn parse_stream(s: &str) -> Result<Stream, String> {
    match s {
        "abbreviated" => Ok(Stream::Abbreviated),
        "expanded" => Ok(Stream::Expanded),
        _ => Err(format!("unknown stream {s:?} (abbreviated, expanded)")),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    pub format: Option<InputFormat>,
    pub stream: Stream,
}

#[derive(Debug)]
pub struct Corpus {
    pub docs: Vec<Document>,
    /// True when every input file was CoNLL-U.
    pub all_conllu: bool,
}

const EXTENSIONS: &[&str] = &["txt", "conllu", "markup"];

/// Expands directories into their corpus files, sorted by path.
pub fn collect_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = fs::read_dir(input).map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .filter(|p| !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.')))
                .filter(|p| p.extension().and_then(|e| e.to_str()).is_some_and(|e| EXTENSIONS.contains(&e)))
                .collect();
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            return Err(Failure::input(format!("{}: no such file or directory", input.display())));
        }
    }
    if files.is_empty() {
        return Err(Failure::input("no corpus files found"));
    }
    Ok(files)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn format_of(path: &Path, text: &str, forced: Option<InputFormat>) -> InputFormat {
    forced.unwrap_or_else(|| {
        if path.extension().is_some_and(|e| e == "conllu") || looks_like_conllu(text) {
            InputFormat::Conllu
        } else {
            InputFormat::Markup
        }
    })
}

fn doc_id_of(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "doc".to_string(), |s| s.to_string_lossy().into_owned())
}

/// Parses one file; errors are `path:line:col: reason` diagnostics.
pub fn load_file(path: &Path, opts: LoadOptions) -> Result<(Vec<Document>, InputFormat), String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let (line, col) = line_col(&String::from_utf8_lossy(e.as_bytes()), e.utf8_error().valid_up_to());
        format!("{}:{line}:{col}: invalid UTF-8", path.display())
    })?;
    let doc_id = doc_id_of(path);
    let format = format_of(path, &text, opts.format);
    let docs = match format {
        InputFormat::Markup => parse_markup_text(&text, &doc_id)
            .map(|d| vec![d])
            .map_err(|e| {
                let (line, col) = line_col(&text, e.offset());
                format!("{}:{line}:{col}: {e}", path.display())
            })?,
        InputFormat::Conllu => parse_conllu_corpus(&text, opts.stream, &doc_id)
            .map_err(|e| format!("{}:{}: {e}", path.display(), e.line_no()))?,
    };
    Ok((docs, format))
}

/// Loads every file, reporting all bad files on stderr before failing.
pub fn load_corpus(inputs: &[PathBuf], opts: LoadOptions) -> Result<Corpus, Failure> {
    let files = collect_files(inputs)?;
    let mut docs = Vec::new();
    let mut all_conllu = true;
    let mut errors = Vec::new();
    for path in &files {
        match load_file(path, opts) {
            Ok((d, format)) => {
                all_conllu &= format == InputFormat::Conllu;
                docs.extend(d);
            }
            Err(diag) => errors.push(diag),
        }
    }
    if let Some(first) = errors.first() {
        for extra in &errors[1..] {
            eprintln!("error: {extra}");
        }
        return Err(Failure::input(first.clone()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for d in &docs {
        if !seen.insert(d.doc_id.as_str()) {
            return Err(Failure::input(format!("duplicate document id {:?}", d.doc_id)));
        }
    }
    Ok(Corpus { docs, all_conllu })
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::input(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    let name = path.file_name().map_or_else(|| "out".into(), |n| n.to_string_lossy().into_owned());
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(fail)?;
    fs::rename(&tmp, path).map_err(fail)
}
