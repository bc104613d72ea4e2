use crate::config::{SeedList, Settings};
use crate::failure::{list_keys, Failure};
use crate::io::{load_corpus, parse_stream, write_atomic, Corpus, InputFormat, LoadOptions};
use crate::methods::{parse_case_mode, Identifier, Method, MethodOptions, DEFAULT_ENDPOINT};
use crate::{
    CorpusArgs, EvalIdentArgs, EvalNerArgs, ExpandArgs, IdentifyArgs, MethodArgs, SplitArgs, SplitFileArgs,
    SplitSpecArgs, StatsArgs, TrainBigramsArgs, TrainClassifierArgs,
};
use abbrx::bridge::ServiceAddress;
use abbrx::classifier::{label_tokens, multi_seed_protocol, Hyperparams, Labeled};
use abbrx::corpus::{
    compute_stats, format_stats_tsv, serialize_conllu, serialize_markup_sentence, serialize_markup_text,
    split_corpus, Document, Sentence, SplitSpec, SplitUnit, Stream, TypeKey,
};
use abbrx::evaluation::{
    emit_prf_table, emit_report, score_identification, score_ner, substitute_gold_expansions, ReportFormat,
};
use abbrx::expansion::{
    expand_document, ExpansionLog, ExpansionPolicy, FillMaskProvider, HttpFillMask, MatchRule, NgramContextModel,
};
use abbrx::identifiers::{train_bigram, BigramConfig, BigramTokenizer, IdentificationResult};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

fn load_options(settings: &Settings, format: &Option<String>, stream: &Option<String>) -> Result<LoadOptions, Failure> {
    let format = settings.get::<InputFormat>(format.as_deref().map(str::parse).transpose().map_err(Failure::Input)?, "input-format")?;
    let stream = match settings.get(stream.clone(), "stream")? {
        Some(s) => parse_stream(&s).map_err(Failure::Input)?,
        None => Stream::Abbreviated,
    };
    Ok(LoadOptions { format, stream })
}

fn corpus_options(settings: &Settings, args: &CorpusArgs) -> Result<LoadOptions, Failure> {
    load_options(settings, &args.input_format, &args.stream)
}

fn out_dir(settings: &Settings, flag: &Option<PathBuf>) -> Result<Option<PathBuf>, Failure> {
    settings.get(flag.clone(), "out")
}

fn required_out(settings: &Settings, flag: &Option<PathBuf>) -> Result<PathBuf, Failure> {
    out_dir(settings, flag)?.ok_or_else(|| Failure::input("missing --out directory"))
}

fn report_format(settings: &Settings, flag: &Option<String>) -> Result<ReportFormat, Failure> {
    settings.get_or(flag.as_deref().map(str::parse).transpose().map_err(Failure::Input)?, "format", ReportFormat::Tsv)
}

fn extension(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Tsv => "tsv",
        ReportFormat::Json => "json",
        ReportFormat::Markdown => "md",
    }
}

fn type_key(settings: &Settings, flag: &Option<String>) -> Result<TypeKey, Failure> {
    match settings.get(flag.clone(), "type-key")?.as_deref() {
        None | Some("exact") => Ok(TypeKey::Exact),
        Some("lowercase") | Some("lower") => Ok(TypeKey::Lowercase),
        Some(other) => Err(Failure::input(format!("unknown type key {other:?} (exact, lowercase)"))),
    }
}

fn split_spec(settings: &Settings, args: &SplitSpecArgs, default: Option<&str>) -> Result<Option<SplitSpec>, Failure> {
    let Some(text) = settings.get(args.split_spec.clone(), "split-spec")?.or(default.map(String::from)) else {
        return Ok(None);
    };
    let seed = settings.get_or(args.seed, "seed", 0)?;
    let unit = match settings.get(args.unit.clone(), "unit")?.as_deref() {
        None | Some("sentence") => SplitUnit::Sentence,
        Some("document") => SplitUnit::Document,
        Some(other) => return Err(Failure::input(format!("unknown split unit {other:?} (sentence, document)"))),
    };
    let spec = SplitSpec::parse(&text, seed).map_err(|e| Failure::input(format!("split spec {text:?}: {e}")))?;
    Ok(Some(spec.with_unit(unit)))
}

fn all_sentences(docs: &[Document]) -> Vec<Sentence> {
    docs.iter().flat_map(|d| d.sentences.iter().cloned()).collect()
}

pub fn stats(args: &StatsArgs, settings: &Settings) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus.inputs, corpus_options(settings, &args.corpus)?)?;
    let key = type_key(settings, &args.type_key)?;
    let rows = match split_spec(settings, &args.split, None)? {
        Some(spec) => {
            let splits = split_corpus(&corpus.docs, &spec).map_err(|e| Failure::input(e.to_string()))?;
            compute_stats(&splits.named(), key)
        }
        None => {
            let all = all_sentences(&corpus.docs);
            let mut rows = compute_stats(&[("total", &all)], key);
            rows.split_off(rows.len() - 1)
        }
    };
    let tsv = format_stats_tsv(&rows);
    print!("{tsv}");
    if let Some(out) = out_dir(settings, &args.out)? {
        write_atomic(&out.join("stats.tsv"), &tsv)?;
    }
    Ok(())
}

fn serialize_sentences(sentences: &[Sentence], conllu: bool) -> String {
    if !conllu {
        return sentences
            .iter()
            .map(|s| serialize_markup_sentence(s) + "\n")
            .collect();
    }
    let mut docs: Vec<Document> = Vec::new();
    for s in sentences {
        match docs.last_mut() {
            Some(d) if d.doc_id == s.doc_id => d.sentences.push(s.clone()),
            _ => docs.push(Document::new(s.doc_id.clone(), "", vec![s.clone()])),
        }
    }
    serialize_conllu(&docs)
}

pub fn split(args: &SplitArgs, settings: &Settings) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus.inputs, corpus_options(settings, &args.corpus)?)?;
    let out = required_out(settings, &args.out)?;
    let spec = split_spec(settings, &args.split, Some("70/10/20"))?.expect("default spec");
    let splits = split_corpus(&corpus.docs, &spec).map_err(|e| Failure::input(e.to_string()))?;
    let ext = if corpus.all_conllu { "conllu" } else { "txt" };
    for (name, sentences) in splits.named() {
        write_atomic(&out.join(format!("{name}.{ext}")), serialize_sentences(sentences, corpus.all_conllu))?;
    }
    let tsv = format_stats_tsv(&compute_stats(&splits.named(), type_key(settings, &args.type_key)?));
    write_atomic(&out.join("stats.tsv"), &tsv)?;
    print!("{tsv}");
    Ok(())
}

struct SplitCorpora {
    train: Corpus,
    dev: Option<Corpus>,
    test: Option<Corpus>,
}

fn split_path(settings: &Settings, args: &SplitFileArgs, name: &str, flag: &Option<PathBuf>) -> Result<Option<PathBuf>, Failure> {
    if let Some(p) = settings.get(flag.clone(), name)? {
        return Ok(Some(p));
    }
    let Some(dir) = settings.get(args.splits.clone(), "splits")? else { return Ok(None) };
    Ok(["conllu", "txt"]
        .iter()
        .map(|ext| dir.join(format!("{name}.{ext}")))
        .find(|p| p.is_file()))
}

fn load_splits(settings: &Settings, args: &SplitFileArgs) -> Result<SplitCorpora, Failure> {
    let opts = load_options(settings, &args.input_format, &args.stream)?;
    let train_path = split_path(settings, args, "train", &args.train)?
        .filter(|p| p.exists())
        .ok_or_else(|| Failure::Training("missing train split".to_string()))?;
    let train = load_corpus(&[train_path], opts)?;
    if train.docs.iter().all(|d| d.sentences.is_empty()) {
        return Err(Failure::Training("train split is empty".to_string()));
    }
    let load = |name, flag| -> Result<Option<Corpus>, Failure> {
        split_path(settings, args, name, flag)?
            .map(|p| load_corpus(&[p], opts))
            .transpose()
    };
    Ok(SplitCorpora {
        train,
        dev: load("dev", &args.dev)?,
        test: load("test", &args.test)?,
    })
}

pub fn train_bigrams(args: &TrainBigramsArgs, settings: &Settings) -> Result<(), Failure> {
    let splits = load_splits(settings, &args.files)?;
    let out = required_out(settings, &args.out)?;
    let config = BigramConfig {
        threshold: settings.get_or(args.threshold, "threshold", BigramConfig::default().threshold)?,
        fold_case: settings.flag(args.fold_case, "fold-case")?,
        ..BigramConfig::default()
    };
    let tokens: Vec<String> = splits
        .train
        .docs
        .iter()
        .flat_map(|d| BigramTokenizer.tokenize(&d.raw_text))
        .collect();
    let model = train_bigram(&tokens, config).map_err(|e| Failure::Training(e.to_string()))?;
    write_atomic(&out.join("bigrams.tsv"), model.to_tsv())?;
    let both = model.counts_a.keys().filter(|k| model.counts_b.contains_key(*k)).count();
    println!(
        "bigram model: {} types in abbreviation position, {} elsewhere, {} in both",
        model.counts_a.len(),
        model.counts_b.len(),
        both
    );
    Ok(())
}

fn labeled(corpus: &Corpus) -> Vec<Labeled> {
    corpus
        .docs
        .iter()
        .flat_map(|d| label_tokens(d.dirty_tokens(), &d.gold_dirty_flags()))
        .collect()
}

pub fn train_classifier(args: &TrainClassifierArgs, settings: &Settings) -> Result<(), Failure> {
    let splits = load_splits(settings, &args.files)?;
    let out = required_out(settings, &args.out)?;
    let seeds = match settings.get::<SeedList>(args.seeds.as_deref().map(str::parse).transpose().map_err(Failure::Input)?, "seeds")? {
        Some(list) => list.0,
        None => vec![settings.get_or(args.seed, "seed", Hyperparams::default().seed)?],
    };
    let d = Hyperparams::default();
    let hp = Hyperparams {
        epochs: settings.get_or(args.epochs, "epochs", d.epochs)?,
        learning_rate: settings.get_or(args.learning_rate, "learning-rate", d.learning_rate)?,
        l2: settings.get_or(args.l2, "l2", d.l2)?,
        threshold: settings.get_or(args.threshold, "threshold", d.threshold)?,
        seed: d.seed,
    };
    let train = labeled(&splits.train);
    let dev = splits.dev.as_ref().map(labeled).unwrap_or_default();
    let test = splits.test.as_ref().map(labeled);
    let (models, report) = multi_seed_protocol(&seeds, &train, &dev, test.as_deref(), hp)?;
    for (seed, model) in seeds.iter().zip(&models) {
        write_atomic(&out.join(format!("scorer-seed{seed}.txt")), model.to_text())?;
    }
    let tsv = report.to_tsv();
    write_atomic(&out.join("train_report.tsv"), &tsv)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&out.join("train_report.json"), json + "\n")?;
    print!("{tsv}");
    Ok(())
}

fn method_options(settings: &Settings, args: &MethodArgs) -> Result<MethodOptions, Failure> {
    let method = settings
        .get::<Method>(args.method.as_deref().map(str::parse).transpose().map_err(Failure::Input)?, "method")?
        .ok_or_else(|| Failure::input("missing --method"))?;
    let dict_case = match settings.get(args.dict_case.clone(), "dict-case")? {
        Some(s) => parse_case_mode(&s).map_err(Failure::Input)?,
        None => abbrx::identifiers::CaseMode::Exact,
    };
    Ok(MethodOptions {
        method,
        dicts: settings.list(args.dict.clone(), "dict")?,
        dict_case,
        model: settings.get(args.model.clone(), "model")?,
        endpoint: settings.get_or(args.endpoint.clone(), "endpoint", DEFAULT_ENDPOINT.to_string())?,
        threshold: settings.get(args.threshold, "threshold")?,
    })
}

fn identify_all(identifier: &Identifier, docs: &[Document]) -> Result<Vec<IdentificationResult>, Failure> {
    docs.iter().map(|d| identifier.identify(d)).collect()
}

fn has_gold(docs: &[Document]) -> bool {
    docs.iter().flat_map(|d| d.tokens()).any(|t| t.is_abbr)
}

const FLAGS_HEADER: &str = "doc_id\tsent_index\tposition\traw\tpred\tgold";

fn flags_tsv(docs: &[Document], results: &[IdentificationResult], gold: bool) -> String {
    let mut out = format!("{FLAGS_HEADER}\n");
    for (doc, result) in docs.iter().zip(results) {
        let gold_flags = doc.gold_dirty_flags();
        for ((tok, pred), g) in doc.dirty_tokens().iter().zip(&result.flags).zip(&gold_flags) {
            let r = tok.sentence_ref.as_ref().expect("document tokens carry references");
            let g = if gold { if *g { "1" } else { "0" } } else { "-" };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                r.doc_id,
                r.sent_index,
                r.position,
                tok.raw,
                u8::from(*pred),
                g
            ));
        }
    }
    out
}

pub fn identify(args: &IdentifyArgs, settings: &Settings) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus.inputs, corpus_options(settings, &args.corpus)?)?;
    let out = required_out(settings, &args.out)?;
    let format = report_format(settings, &args.format)?;
    let identifier = Identifier::load(&method_options(settings, &args.method)?)?;
    let results = identify_all(&identifier, &corpus.docs)?;
    let gold = has_gold(&corpus.docs);
    write_atomic(&out.join("flags.tsv"), flags_tsv(&corpus.docs, &results, gold))?;

    let method = results.first().map_or_else(|| "none".to_string(), |r| r.method.clone());
    let pred: Vec<bool> = results.iter().flat_map(|r| r.flags.iter().copied()).collect();
    let flagged = pred.iter().filter(|f| **f).count();
    println!("{method}: flagged {flagged} of {} tokens", pred.len());
    if gold {
        let gold_flags: Vec<bool> = corpus.docs.iter().flat_map(|d| d.gold_dirty_flags()).collect();
        let prf = score_identification(&IdentificationResult::new(method.clone(), pred), &gold_flags)?;
        let table = emit_prf_table(&[(method, prf)], None, format);
        write_atomic(&out.join(format!("ident_report.{}", extension(format))), &table)?;
        print!("{}", String::from_utf8_lossy(&table));
    }
    Ok(())
}

fn parse_match(s: &str) -> Result<MatchRule, String> {
    match s {
        "ci" | "case-insensitive" => Ok(MatchRule::FirstLetterCaseInsensitive),
        "exact" => Ok(MatchRule::FirstLetterExact),
        _ => Err(format!("unknown match rule {s:?} (ci, exact)")),
    }
}

fn lm_sentences(paths: &[PathBuf], format: Option<InputFormat>) -> Result<Vec<Vec<String>>, Failure> {
    let corpus = load_corpus(paths, LoadOptions { format, stream: Stream::Expanded })?;
    let mut out = Vec::new();
    for doc in &corpus.docs {
        let expanded = substitute_gold_expansions(doc)?;
        out.extend(
            expanded
                .sentences
                .iter()
                .map(|s| s.text().split_whitespace().map(String::from).collect()),
        );
    }
    Ok(out)
}

pub fn expand(args: &ExpandArgs, settings: &Settings) -> Result<(), Failure> {
    let opts = corpus_options(settings, &args.corpus)?;
    let corpus = load_corpus(&args.corpus.inputs, opts)?;
    let out = required_out(settings, &args.out)?;
    let method = method_options(settings, &args.method)?;
    let policy = ExpansionPolicy {
        top_k: settings.get_or(args.top_k, "top-k", ExpansionPolicy::default().top_k)?,
        match_rule: match settings.get(args.match_rule.clone(), "match")? {
            Some(s) => parse_match(&s).map_err(Failure::Input)?,
            None => MatchRule::default(),
        },
        cascade: settings.flag(args.cascade, "cascade")?,
        ..ExpansionPolicy::default()
    };
    let provider_name = settings.get_or(args.provider.clone(), "provider", "ngram".to_string())?;
    let identifier = Identifier::load(&method)?;
    let provider: Box<dyn FillMaskProvider> = match provider_name.as_str() {
        "ngram" => {
            let paths = settings.list(args.lm_train.clone(), "lm-train")?;
            if paths.is_empty() {
                return Err(Failure::input("provider ngram needs --lm-train"));
            }
            Box::new(NgramContextModel::train(&lm_sentences(&paths, opts.format)?))
        }
        "http" => Box::new(HttpFillMask::new(ServiceAddress::new(method.endpoint.clone()))),
        other => return Err(Failure::input(format!("unknown provider {other:?} (ngram, http)"))),
    };

    let mut expanded = Vec::with_capacity(corpus.docs.len());
    let mut log = ExpansionLog::default();
    for doc in &corpus.docs {
        let flags = identifier.identify(doc)?;
        let (d, l) = expand_document(doc, &flags, &policy, provider.as_ref())?;
        expanded.push(d);
        log.extend(l);
    }
    let markup: String = expanded.iter().map(serialize_markup_text).collect();
    write_atomic(&out.join("expanded.txt"), markup)?;
    write_atomic(&out.join("expanded.conllu"), serialize_conllu(&expanded))?;
    write_atomic(&out.join("expansion_log.tsv"), log.to_tsv())?;
    println!(
        "expanded {} of {} flagged abbreviations, kept {}",
        log.expanded(),
        log.entries.len(),
        log.kept()
    );
    Ok(())
}

type FlagKey = (String, usize, usize);

fn read_flags(path: &Path) -> Result<BTreeMap<FlagKey, bool>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == FLAGS_HEADER => {}
        _ => return Err(Failure::input(format!("{}:1: expected header {FLAGS_HEADER:?}", path.display()))),
    }
    let mut flags = BTreeMap::new();
    for (i, line) in lines {
        let at = || format!("{}:{}", path.display(), i + 1);
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(Failure::input(format!("{}: expected 6 columns, found {}", at(), cols.len())));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Failure::input(format!("{}: bad number {s:?}", at())));
        let pred = match cols[4] {
            "1" => true,
            "0" => false,
            other => return Err(Failure::input(format!("{}: pred must be 0 or 1, found {other:?}", at()))),
        };
        flags.insert((cols[0].to_string(), num(cols[1])?, num(cols[2])?), pred);
    }
    Ok(flags)
}

fn missing<'a>(from: &'a BTreeMap<FlagKey, bool>, other: &BTreeMap<FlagKey, bool>) -> Vec<(&'a str, String)> {
    from.keys()
        .filter(|k| !other.contains_key(*k))
        .map(|(d, s, p)| (d.as_str(), format!("{s}/{p}")))
        .collect()
}

pub fn eval_ident(args: &EvalIdentArgs, settings: &Settings) -> Result<(), Failure> {
    let pred = read_flags(&args.pred)?;
    let corpus = load_corpus(&args.gold, load_options(settings, &args.input_format, &args.stream)?)?;
    let format = report_format(settings, &args.format)?;
    let mut gold = BTreeMap::new();
    for doc in &corpus.docs {
        for (tok, g) in doc.dirty_tokens().iter().zip(doc.gold_dirty_flags()) {
            let r = tok.sentence_ref.as_ref().expect("document tokens carry references");
            gold.insert((r.doc_id.clone(), r.sent_index, r.position), g);
        }
    }
    let (missing_in_pred, missing_in_gold) = (missing(&gold, &pred), missing(&pred, &gold));
    if !missing_in_pred.is_empty() || !missing_in_gold.is_empty() {
        return Err(Failure::input(format!(
            "unaligned flags\n  missing in predictions: {}\n  missing in gold: {}",
            list_keys(&missing_in_pred),
            list_keys(&missing_in_gold)
        )));
    }
    let label = args
        .pred
        .file_stem()
        .map_or_else(|| "pred".to_string(), |s| s.to_string_lossy().into_owned());
    let result = IdentificationResult::new(label.clone(), pred.values().copied().collect());
    let gold: Vec<bool> = gold.values().copied().collect();
    let prf = score_identification(&result, &gold)?;
    let table = emit_prf_table(&[(label, prf)], None, format);
    if let Some(out) = out_dir(settings, &args.out)? {
        write_atomic(&out.join(format!("ident_eval.{}", extension(format))), &table)?;
    }
    print!("{}", String::from_utf8_lossy(&table));
    Ok(())
}

pub fn eval_ner(args: &EvalNerArgs, settings: &Settings) -> Result<(), Failure> {
    let opts = load_options(settings, &args.input_format, &args.stream)?;
    let pred = load_corpus(&args.pred, opts)?;
    let gold = load_corpus(&args.gold, opts)?;
    let format = report_format(settings, &args.format)?;
    let report = score_ner(&pred.docs, &gold.docs)?;
    let bytes = emit_report(&report, format);
    if let Some(out) = out_dir(settings, &args.out)? {
        write_atomic(&out.join(format!("ner_report.{}", extension(format))), &bytes)?;
    }
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}
