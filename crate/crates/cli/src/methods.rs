use crate::failure::Failure;
use abbrx::bridge::ServiceAddress;
use abbrx::classifier::{classify_tokens, RemoteScorer, ScorerModel};
use abbrx::corpus::Document;
use abbrx::identifiers::{
    bigram_identify, dict_identify, union_identify, BigramModel, CaseMode, DictionaryResource, IdentificationResult,
};
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const DEFAULT_ENDPOINT: &str = "http://127.0.0.1:8765";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Gold annotation, for oracle runs.
    Gold,
    Dict,
    Bigram,
    BigramDict,
    Classifier,
    Remote,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold" => Ok(Method::Gold),
            "dict" => Ok(Method::Dict),
            "bigram" => Ok(Method::Bigram),
            "bigram+dict" | "dict+bigram" => Ok(Method::BigramDict),
            "classifier" => Ok(Method::Classifier),
            "remote" => Ok(Method::Remote),
            _ => Err(format!(
                "unknown method {s:?} (gold, dict, bigram, bigram+dict, classifier, remote)"
            )),
        }
    }
}

pub fn parse_case_mode(s: &str) -> Result<CaseMode, String> {
    match s {
        "exact" => Ok(CaseMode::Exact),
        "lower" => Ok(CaseMode::Lower),
        _ => Err(format!("unknown dictionary case mode {s:?} (exact, lower)")),
    }
}

#[derive(Debug, Clone)]
pub struct MethodOptions {
    pub method: Method,
    pub dicts: Vec<PathBuf>,
    pub dict_case: CaseMode,
    pub model: Option<PathBuf>,
    pub endpoint: String,
    pub threshold: Option<f64>,
}

pub enum Identifier {
    Gold,
    Dict(DictionaryResource),
    Bigram(BigramModel),
    BigramDict(BigramModel, DictionaryResource),
    Classifier(ScorerModel),
    Remote(RemoteScorer, f64),
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Merges all dictionary files; a token is known if any file lists it.
fn load_dictionary(paths: &[PathBuf], case_mode: CaseMode) -> Result<DictionaryResource, Failure> {
    if paths.is_empty() {
        return Err(Failure::input("method needs at least one --dict file"));
    }
    let mut entries = Vec::new();
    let mut names = Vec::new();
    for p in paths {
        let d = DictionaryResource::parse(p.display().to_string(), &read(p)?, case_mode)
            .map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
        names.push(p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()));
        entries.extend(d.entries);
    }
    DictionaryResource::new(names.join("+"), entries, case_mode).map_err(|e| Failure::input(e.to_string()))
}

fn load_bigram(opts: &MethodOptions) -> Result<BigramModel, Failure> {
    let path = opts.model.as_ref().ok_or_else(|| Failure::input("method bigram needs --model"))?;
    let mut model =
        BigramModel::from_tsv(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(t) = opts.threshold {
        model.config.threshold = t;
    }
    Ok(model)
}

impl Identifier {
    pub fn load(opts: &MethodOptions) -> Result<Self, Failure> {
        Ok(match opts.method {
            Method::Gold => Identifier::Gold,
            Method::Dict => Identifier::Dict(load_dictionary(&opts.dicts, opts.dict_case)?),
            Method::Bigram => Identifier::Bigram(load_bigram(opts)?),
            Method::BigramDict => Identifier::BigramDict(load_bigram(opts)?, load_dictionary(&opts.dicts, opts.dict_case)?),
            Method::Classifier => {
                let path = opts.model.as_ref().ok_or_else(|| Failure::input("method classifier needs --model"))?;
                let mut model = ScorerModel::from_text(&read(path)?)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                if let Some(t) = opts.threshold {
                    model.hyperparams.threshold = t;
                }
                Identifier::Classifier(model)
            }
            Method::Remote => Identifier::Remote(
                RemoteScorer::new(ServiceAddress::new(opts.endpoint.clone())),
                opts.threshold.unwrap_or(0.5),
            ),
        })
    }

    pub fn identify(&self, doc: &Document) -> Result<IdentificationResult, Failure> {
        let tokens = doc.dirty_tokens();
        Ok(match self {
            Identifier::Gold => IdentificationResult::new("gold", doc.gold_dirty_flags()),
            Identifier::Dict(d) => dict_identify(&tokens, d),
            Identifier::Bigram(m) => bigram_identify(&tokens, m),
            Identifier::BigramDict(m, d) => union_identify(&[bigram_identify(&tokens, m), dict_identify(&tokens, d)])
                .map_err(|e| Failure::input(e.to_string()))?,
            Identifier::Classifier(m) => m.identify(&tokens),
            Identifier::Remote(scorer, threshold) => classify_tokens(&tokens, scorer, *threshold, "remote")?,
        })
    }
}
