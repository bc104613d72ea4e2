//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero only when an outcome differs from the one recorded in `EXPECTED_FAILURES`.
//!
//! Set `ABBRX_CORPUS_DIR` to a directory of annotated `.txt`/`.conllu` files
//! to also check the full-corpus totals.

use abbrx::classifier::{train_scorer, Hyperparams, Labeled, ScorerModel};
use abbrx::corpus::{
    compute_stats, parse_conllu_corpus, parse_markup_text, Document, Sentence, SplitSpec, Stream, Token, TypeKey,
};
use abbrx::evaluation::{
    f1_score, macro_average, ner_counts, round2, score_identification, score_ner, Counts, Prf,
};
use abbrx::expansion::{
    expand_candidate, expand_document, ExpansionError, ExpansionPolicy, FillCandidate, FillMaskProvider,
    NgramContextModel,
};
use abbrx::identifiers::{
    bigram_identify, bigram_probability, train_bigram, BigramConfig, BigramTokenizer, IdentificationResult,
};
use abbrx::tokenization::DirtyToken;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::ExitCode;

type Check = fn() -> Result<String, String>;

/// Criteria whose failure is known and explained; everything else must pass.
const EXPECTED_FAILURES: &[&str] = &["macro-aggregation"];

const CRITERIA: &[(&str, Check)] = &[
    ("f1-arithmetic", f1_arithmetic),
    ("macro-aggregation", macro_aggregation),
    ("bigram-probability-oracle", bigram_oracle),
    ("identification-scoring-oracle", identification_oracle),
    ("span-scoring-oracle", span_oracle),
    ("expansion-acceptance-rule", expansion_rule),
    ("classifier-training", classifier_training),
    ("dataset-statistics", dataset_statistics),
    ("toy-pipeline", toy_pipeline),
];

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    for &(name, check) in CRITERIA {
        let outcome = check();
        let passed = outcome.is_ok();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => println!("FAIL {name}: {detail}"),
        }
        if passed == EXPECTED_FAILURES.contains(&name) {
            unexpected.push(name);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f1_arithmetic() -> Result<String, String> {
    let rows = [
        (89.36, 20.00, 32.68),
        (80.81, 71.19, 75.70),
        (95.85, 76.90, 85.34),
        (73.27, 95.95, 83.09),
    ];
    for (p, r, want) in rows {
        let got = f1_score(p, r);
        ensure((got - want).abs() <= 0.01, || format!("F1({p}, {r}) = {got:.4}, reported {want}"))?;
    }
    Ok(format!("{} rows within 0.01", rows.len()))
}

fn macro_of(rows: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    let prf: Vec<Prf> = rows.iter().map(|&(p, r, f)| Prf::from_scores(p, r, f)).collect();
    let m = macro_average(&prf).expect("non-empty");
    (m.precision, m.recall, m.f1)
}

fn macro_aggregation() -> Result<String, String> {
    let upper = [
        (68.75, 22.45, 33.85),
        (50.00, 4.76, 8.70),
        (85.29, 39.73, 54.21),
        (65.38, 12.41, 20.86),
        (23.53, 14.81, 18.18),
    ];
    let lower_f1 = [70.59, 74.29, 87.10, 32.99, 31.58];
    let unseen_p = [40.54, 78.57, 72.33, 34.34, 17.14];
    let unseen_f1 = [50.70, 64.71, 77.18, 30.63, 25.00];
    let mean = |xs: &[f64]| macro_of(&xs.iter().map(|&x| (x, x, x)).collect::<Vec<_>>()).0;

    let (up, ur, uf) = macro_of(&upper);
    let checks = [
        ("row A precision", up, 58.59),
        ("row A recall", ur, 18.83),
        ("row A F1", uf, 27.16),
        ("row B F1", mean(&lower_f1), 59.31),
        ("unseen F1", mean(&unseen_f1), 49.64),
        ("unseen precision", mean(&unseen_p), 48.59),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 0.005)
        .map(|(what, got, want)| format!("{what} mean is {got:.4}, reported {want}"))
        .collect();
    if bad.is_empty() {
        Ok(format!("{} macro values within 0.005", checks.len()))
    } else {
        Err(format!(
            "{}; the per-class values as printed cannot produce the reported mean",
            bad.join("; ")
        ))
    }
}

const WORDS: &[&str] = &["dr", "Dr", "l", "prof", "Novak", "leta", "in", "str"];

fn bigram_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut flagged = 0;
    for case in 0..100 {
        let len = rng.random_range(1..=50);
        let tokens: Vec<String> = (0..len)
            .map(|_| {
                if rng.random_bool(0.2) {
                    ".".to_string()
                } else {
                    let w = *WORDS.choose(&mut rng).unwrap();
                    if rng.random_bool(0.3) {
                        format!("{w}.")
                    } else {
                        w.to_string()
                    }
                }
            })
            .collect();
        let mut a: BTreeMap<&str, u64> = BTreeMap::new();
        let mut b: BTreeMap<&str, u64> = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if t == "." {
                continue;
            }
            let stem = t.strip_suffix('.').unwrap_or(t);
            let abbr_position = t.ends_with('.') || tokens.get(i + 1).is_some_and(|n| n == ".");
            *if abbr_position { &mut a } else { &mut b }.entry(stem).or_default() += 1;
        }
        let model = match train_bigram(&tokens, BigramConfig::default()) {
            Ok(m) => m,
            Err(_) if a.is_empty() && b.is_empty() => continue,
            Err(e) => return Err(format!("case {case}: training failed: {e}")),
        };
        for w in WORDS {
            let (na, nb) = (a.get(w).copied().unwrap_or(0), b.get(w).copied().unwrap_or(0));
            let want = (na > 0 && nb > 0).then(|| na as f64 / (na + nb) as f64);
            let got = bigram_probability(&model, w).ok();
            ensure(got == want, || format!("case {case}: P({w}) = {got:?}, recount gives {want:?}"))?;
            let decide = want.is_some_and(|p| p >= 0.8);
            flagged += usize::from(decide);
            let stream = [DirtyToken::new(&format!("{w}."), 0), DirtyToken::new(w, 4)];
            let flags = bigram_identify(&stream, &model).flags;
            ensure(flags == [decide, decide], || {
                format!("case {case}: {w} flagged {flags:?}, expected {decide}")
            })?;
        }
    }
    Ok(format!("100 corpora recounted, {flagged} types at or above 0.8"))
}

fn identification_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..100 {
        let len = rng.random_range(0..=200);
        let pred: Vec<bool> = (0..len).map(|_| rng.random_bool(0.3)).collect();
        let gold: Vec<bool> = (0..len).map(|_| rng.random_bool(0.3)).collect();
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for i in 0..len {
            tp += usize::from(pred[i] && gold[i]);
            fp += usize::from(pred[i] && !gold[i]);
            fn_ += usize::from(!pred[i] && gold[i]);
        }
        let p = if tp + fp == 0 { 0.0 } else { 100.0 * tp as f64 / (tp + fp) as f64 };
        let r = if tp + fn_ == 0 { 0.0 } else { 100.0 * tp as f64 / (tp + fn_) as f64 };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        let got = score_identification(&IdentificationResult::new("rand", pred), &gold)
            .map_err(|e| format!("case {case}: {e}"))?;
        ensure(got.counts == Counts { tp, fp, fn_ }, || {
            format!("case {case}: counts {:?}, expected {tp}/{fp}/{fn_}", got.counts)
        })?;
        ensure(
            (got.precision - p).abs() < 1e-9 && (got.recall - r).abs() < 1e-9 && (got.f1 - f).abs() < 1e-9,
            || format!("case {case}: scores {got:?}"),
        )?;
    }
    Ok("100 random flag vectors match the brute-force counts".to_string())
}

const TAGS: &[&str] = &["O", "O", "B-PER", "I-PER", "B-LOC", "I-LOC", "B-ORG", "I-ORG"];

/// Chunks in the conlleval style: an I- tag that does not continue a chunk
/// of its own type begins one.
fn oracle_spans(tags: &[&str]) -> BTreeSet<(String, usize, usize)> {
    let kind = |t: &str| t.split_once('-').map(|(p, l)| (p.to_string(), l.to_string()));
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < tags.len() {
        let Some((_, label)) = kind(tags[i]) else {
            i += 1;
            continue;
        };
        let mut j = i + 1;
        while j < tags.len() && kind(tags[j]) == Some(("I".to_string(), label.clone())) {
            j += 1;
        }
        out.insert((label, i, j));
        i = j;
    }
    out
}

fn tagged_sentence(index: usize, tags: &[&str]) -> Sentence {
    Sentence::new("r", index, tags.iter().map(|t| Token::word("x").with_tag(*t)).collect())
}

fn span_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut total: BTreeMap<String, Counts> = BTreeMap::new();
    let (mut pred_sents, mut gold_sents) = (Vec::new(), Vec::new());
    for case in 0..200 {
        let len = rng.random_range(1..=30);
        let gold: Vec<&str> = (0..len).map(|_| *TAGS.choose(&mut rng).unwrap()).collect();
        let pred: Vec<&str> = gold
            .iter()
            .map(|&t| if rng.random_bool(0.25) { *TAGS.choose(&mut rng).unwrap() } else { t })
            .collect();
        let (gs, ps) = (oracle_spans(&gold), oracle_spans(&pred));
        let mut want: BTreeMap<String, Counts> = BTreeMap::new();
        for s in &ps {
            let c = want.entry(s.0.clone()).or_default();
            if gs.contains(s) {
                c.tp += 1;
            } else {
                c.fp += 1;
            }
        }
        for s in gs.difference(&ps) {
            want.entry(s.0.clone()).or_default().fn_ += 1;
        }
        let got = ner_counts(&pred, &gold);
        ensure(got == want, || format!("case {case}: {got:?} vs oracle {want:?} for {pred:?} / {gold:?}"))?;
        for (l, c) in want {
            total.entry(l).or_default().add(c);
        }
        pred_sents.push(tagged_sentence(case, &pred));
        gold_sents.push(tagged_sentence(case, &gold));
    }
    let report = score_ner(
        &[Document::from_sentences("r", pred_sents)],
        &[Document::from_sentences("r", gold_sents)],
    )
    .map_err(|e| e.to_string())?;
    let got: BTreeMap<String, Counts> = report.per_class.iter().map(|(l, p)| (l.clone(), p.counts)).collect();
    ensure(got == total, || format!("corpus totals {got:?} vs oracle {total:?}"))?;
    Ok("200 random IOB pairs match the independent chunker".to_string())
}

struct Fixed(Vec<FillCandidate>);

impl FillMaskProvider for Fixed {
    fn fill_mask(&self, _: &[String], _: usize, _: usize) -> Result<Vec<FillCandidate>, ExpansionError> {
        Ok(self.0.clone())
    }
}

fn fixed(list: &[(&str, f64)]) -> Fixed {
    Fixed(list.iter().map(|&(t, s)| FillCandidate::new(t, s)).collect())
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

/// Context, mask position, provider answer, expected (token, rank).
type Example<'a> = (&'a str, usize, Fixed, Option<(&'a str, usize)>);

fn expansion_rule() -> Result<String, String> {
    let policy = ExpansionPolicy::default();
    let examples: [Example; 3] = [
        ("rojen l. 1881", 1, fixed(&[("leta", 0.4), ("v", 0.3), ("je", 0.2)]), Some(("leta", 0))),
        (
            "več o tem gl. spodaj",
            3,
            fixed(&[("je", 0.5), ("v", 0.4), ("na", 0.3), ("leta", 0.2), ("bil", 0.1)]),
            None,
        ),
        ("u. 1950", 0, fixed(&[("in", 0.6), ("umrl", 0.3)]), Some(("umrl", 1))),
    ];
    for (ctx, pos, provider, want) in &examples {
        let got = expand_candidate(&words(ctx), *pos, &policy, provider).map_err(|e| e.to_string())?;
        let got = got.as_ref().map(|e| (e.token.as_str(), e.rank));
        ensure(got == *want, || format!("{ctx:?}: got {got:?}, expected {want:?}"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let letters = ['a', 'b', 'l', 'L', 'u', 'ž'];
    let mut kept = 0;
    for case in 0..50 {
        let abbr = format!("{}.", letters.choose(&mut rng).unwrap());
        let n = rng.random_range(0..8);
        let cands: Vec<(String, f64)> = (0..n)
            .map(|_| {
                let head = letters.choose(&mut rng).unwrap();
                let tail = ["eta", "mrl", "x", ""].choose(&mut rng).unwrap();
                (format!("{head}{tail}"), f64::from(rng.random_range(1..4)) / 10.0)
            })
            .collect();
        let top_k = rng.random_range(1..=6);
        let policy = ExpansionPolicy { top_k, ..ExpansionPolicy::default() };

        let mut ranked = cands.clone();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        let mut seen = BTreeSet::new();
        ranked.retain(|c| seen.insert(c.0.clone()));
        let letter = abbr.chars().next().unwrap().to_lowercase().to_string();
        let want = ranked
            .iter()
            .take(top_k)
            .position(|c| c.0.chars().next().unwrap().to_lowercase().to_string() == letter)
            .map(|r| (ranked[r].0.clone(), r));

        let provider = Fixed(cands.iter().map(|(t, s)| FillCandidate::new(t.clone(), *s)).collect());
        let got = expand_candidate(&words(&format!("x {abbr} y")), 1, &policy, &provider)
            .map_err(|e| e.to_string())?
            .map(|e| (e.token, e.rank));
        ensure(got == want, || format!("case {case}: {abbr} over {cands:?} top {top_k}: {got:?} vs {want:?}"))?;

        let doc = Document::from_sentences(
            "p",
            vec![Sentence::new("p", 0, vec![Token::word("x"), Token::word(abbr.clone()), Token::word("y")])],
        );
        let flags = IdentificationResult::new("t", vec![false, true, false]);
        let (out, log) = expand_document(&doc, &flags, &policy, &provider).map_err(|e| e.to_string())?;
        match &want {
            None => {
                kept += 1;
                ensure(out.raw_text == doc.raw_text && log.kept() == 1, || {
                    format!("case {case}: unmatched {abbr} changed the text to {:?}", out.raw_text)
                })?;
            }
            Some((token, _)) => ensure(out.raw_text == format!("x {token} y\n"), || {
                format!("case {case}: expected {token} in {:?}", out.raw_text)
            })?,
        }
    }
    Ok(format!("3 examples and 50 random lists ({kept} without a match)"))
}

const POSITIVE: &[&str] = &["l.", "dr.", "prof.", "gl.", "npr.", "str.", "itd.", "t.i."];
const NEGATIVE: &[&str] = &["Trst", "leta", "Novak", "je", "v", "Ljubljani", "1881", "umrl", "in"];

fn labeled(pos: &[&str], neg: &[&str]) -> Vec<Labeled> {
    pos.iter()
        .map(|t| (DirtyToken::new(t, 0), true))
        .chain(neg.iter().map(|t| (DirtyToken::new(t, 0), false)))
        .collect()
}

fn classifier_training() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let pool: Vec<&str> = POSITIVE.iter().chain(NEGATIVE).copied().collect();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let n = rng.random_range(2..=8);
        let data: Vec<Labeled> = (0..n)
            .map(|_| (DirtyToken::new(pool.choose(&mut rng).unwrap(), 0), rng.random_bool(0.5)))
            .collect();
        let vocab = ScorerModel::build_vocab(data.iter().map(|(t, _)| t));
        let weights = (0..vocab.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let hp = Hyperparams { l2: rng.random_range(0.0..0.1), ..Hyperparams::default() };
        let model = ScorerModel::new(vocab, weights, rng.random_range(-1.0..1.0), hp);
        let (gw, gb) = model.gradient(&data);
        let numeric = |perturb: &dyn Fn(&mut ScorerModel, f64)| {
            let (mut up, mut down) = (model.clone(), model.clone());
            perturb(&mut up, h);
            perturb(&mut down, -h);
            (up.loss(&data) - down.loss(&data)) / (2.0 * h)
        };
        let mut pairs: Vec<(f64, f64)> = (0..gw.len())
            .map(|j| (gw[j], numeric(&|m: &mut ScorerModel, d| m.weights[j] += d)))
            .collect();
        pairs.push((gb, numeric(&|m: &mut ScorerModel, d| m.bias += d)));
        for (j, (analytic, fd)) in pairs.into_iter().enumerate() {
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-8);
            worst = worst.max(rel);
            ensure(rel <= 1e-6, || format!("model {case}, parameter {j}: {analytic} vs {fd} (rel {rel:.2e})"))?;
        }
    }

    let train = labeled(POSITIVE, NEGATIVE);
    let hp = Hyperparams { epochs: 5, ..Hyperparams::default() };
    let (model, _) = train_scorer(&train, &[], hp).map_err(|e| e.to_string())?;
    let wrong: Vec<&str> = train
        .iter()
        .filter(|(t, y)| model.predict(t) != *y)
        .map(|(t, _)| t.raw.as_str())
        .collect();
    ensure(wrong.is_empty(), || format!("separable set misclassified after 5 epochs: {wrong:?}"))?;

    let (again, _) = train_scorer(&train, &[], hp).map_err(|e| e.to_string())?;
    let bits = |m: &ScorerModel| m.weights.iter().chain([&m.bias]).map(|w| w.to_bits()).collect::<Vec<_>>();
    ensure(bits(&model) == bits(&again) && model.to_text() == again.to_text(), || {
        "retraining with the same seed changed the weights".to_string()
    })?;
    Ok(format!(
        "gradient rel. error {worst:.1e} over 20 models, separable set fit in 5 epochs, retrain bit-identical"
    ))
}

fn load_dir(dir: &Path) -> Result<Vec<Document>, String> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("txt" | "conllu" | "markup")))
        .collect();
    paths.sort();
    let mut docs = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("doc");
        if p.extension().is_some_and(|e| e == "conllu") {
            docs.extend(parse_conllu_corpus(&text, Stream::Abbreviated, stem).map_err(|e| format!("{}: {e}", p.display()))?);
        } else {
            docs.push(parse_markup_text(&text, stem).map_err(|e| format!("{}: {e}", p.display()))?);
        }
    }
    Ok(docs)
}

fn dataset_statistics() -> Result<String, String> {
    let sizes = SplitSpec::new(70, 10, 20, 0).map_err(|e| e.to_string())?.allocate(655);
    ensure(sizes == [458, 66, 131], || format!("655 sentences split as {sizes:?}"))?;
    let Some(dir) = std::env::var_os("ABBRX_CORPUS_DIR") else {
        return Ok("655 sentences split 458/66/131; corpus totals skipped (ABBRX_CORPUS_DIR unset)".to_string());
    };
    let docs = load_dir(Path::new(&dir))?;
    let sentences: Vec<Sentence> = docs.into_iter().flat_map(|d| d.sentences).collect();
    let rows = compute_stats(&[("all", &sentences)], TypeKey::Exact);
    let s = rows.last().expect("total row").stats;
    let got = (s.n_sentences, s.n_abbr_instances, s.n_unique_abbr);
    ensure(got == (655, 2041, 710), || format!("corpus has {got:?}, expected (655, 2041, 710)"))?;
    Ok("655 sentences, 2041 abbreviations, 710 types; split 458/66/131".to_string())
}

fn toy_pipeline() -> Result<String, String> {
    let tokens = BigramTokenizer.tokenize("l. x l. y l. z l. w l");
    let bigrams = train_bigram(&tokens, BigramConfig::default()).map_err(|e| e.to_string())?;
    let p = bigram_probability(&bigrams, "l").map_err(|e| e.to_string())?;
    ensure(p == 0.8, || format!("P(l) = {p}, hand count 4/5"))?;

    let doc = parse_markup_text("Rojen [[l.]]((leta)) 1881 in x.\n", "toy").map_err(|e| e.to_string())?;
    let flags = bigram_identify(&doc.dirty_tokens(), &bigrams);
    ensure(flags.flags == [false, true, false, false, false], || format!("flags {:?}", flags.flags))?;
    let prf = score_identification(&flags, &doc.gold_dirty_flags()).map_err(|e| e.to_string())?;
    ensure(prf.counts == Counts { tp: 1, fp: 0, fn_: 0 }, || format!("identification {prf:?}"))?;

    let lm = NgramContextModel::train(&[words("Rojen leta 1881 in umrl"), words("umrl leta 1950")]);
    let (expanded, log) =
        expand_document(&doc, &flags, &ExpansionPolicy::default(), &lm).map_err(|e| e.to_string())?;
    ensure(expanded.raw_text == "Rojen leta 1881 in x.\n" && log.expanded() == 1, || {
        format!("expanded to {:?}", expanded.raw_text)
    })?;

    let gold = ["B-PER", "I-PER", "O", "B-LOC"];
    let pred = ["B-PER", "O", "O", "B-LOC"];
    let report = score_ner(
        &[Document::from_sentences("n", vec![tagged_sentence(0, &pred)])],
        &[Document::from_sentences("n", vec![tagged_sentence(0, &gold)])],
    )
    .map_err(|e| e.to_string())?;
    let macro_f1 = report.macro_avg.map(|m| round2(m.f1));
    ensure(macro_f1 == Some(50.0), || format!("toy NER macro F1 {macro_f1:?}, hand value 50.00"))?;
    Ok("bigram counts, flags, expansion and NER scores match hand-computed values".to_string())
}
