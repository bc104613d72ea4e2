mod commands;
mod config;
mod failure;
mod io;
mod methods;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "abbrx",
    version,
    about = "Identify, expand and evaluate abbreviations in annotated corpora",
    after_long_help = config::HELP
)]
struct Cli {
    /// Flat `key = value` settings file (see --help).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sentence and abbreviation counts, optionally per split.
    Stats(StatsArgs),
    /// Shuffle sentences into train/dev/test files.
    Split(SplitArgs),
    /// Count abbreviation-position statistics over the train split.
    TrainBigrams(TrainBigramsArgs),
    /// Train the character n-gram scorer once per seed.
    TrainClassifier(TrainClassifierArgs),
    /// Flag abbreviations and score them against gold when available.
    Identify(IdentifyArgs),
    /// Replace flagged abbreviations with fill-mask predictions.
    Expand(ExpandArgs),
    /// Score a flag file against a gold corpus.
    EvalIdent(EvalIdentArgs),
    /// Span-level NER scores of predicted against gold IOB tags.
    EvalNer(EvalNerArgs),
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    /// Corpus files or directories (.txt, .markup, .conllu).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Force the input format: markup or conllu.
    #[arg(long, value_name = "FORMAT")]
    pub input_format: Option<String>,
    /// CoNLL-U token stream: abbreviated or expanded.
    #[arg(long)]
    pub stream: Option<String>,
}

#[derive(Args, Debug)]
pub struct SplitSpecArgs {
    /// Integer or fractional parts, e.g. 70/10/20.
    #[arg(long, value_name = "A/B/C")]
    pub split_spec: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shuffle unit: sentence or document.
    #[arg(long)]
    pub unit: Option<String>,
}

#[derive(Args, Debug)]
pub struct SplitFileArgs {
    /// Directory written by `split`.
    #[arg(long, value_name = "DIR")]
    pub splits: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub train: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub dev: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub test: Option<PathBuf>,
    #[arg(long, value_name = "FORMAT")]
    pub input_format: Option<String>,
    #[arg(long)]
    pub stream: Option<String>,
}

#[derive(Args, Debug)]
pub struct MethodArgs {
    /// gold, dict, bigram, bigram+dict, classifier or remote.
    #[arg(long)]
    pub method: Option<String>,
    /// Word list of known non-abbreviations; repeatable.
    #[arg(long, value_name = "FILE")]
    pub dict: Vec<PathBuf>,
    /// Dictionary lookup: exact or lower.
    #[arg(long)]
    pub dict_case: Option<String>,
    /// Bigram TSV or scorer model file.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Bridge service base URL.
    #[arg(long, value_name = "URL")]
    pub endpoint: Option<String>,
    /// Decision threshold; overrides the one stored with the model.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub split: SplitSpecArgs,
    /// Unique-type key: exact or lowercase.
    #[arg(long)]
    pub type_key: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub split: SplitSpecArgs,
    #[arg(long)]
    pub type_key: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainBigramsArgs {
    #[command(flatten)]
    pub files: SplitFileArgs,
    /// Decision threshold stored with the model.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub fold_case: bool,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainClassifierArgs {
    #[command(flatten)]
    pub files: SplitFileArgs,
    /// Seed list, e.g. 1,2,3 or 1..5.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Single seed, used when --seeds is absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Report format: tsv, json or markdown.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Fill-mask provider: ngram or http.
    #[arg(long)]
    pub provider: Option<String>,
    /// Expanded training text for the ngram provider; repeatable.
    #[arg(long, value_name = "PATH")]
    pub lm_train: Vec<PathBuf>,
    /// Candidates examined per abbreviation (default 5).
    #[arg(long)]
    pub top_k: Option<usize>,
    /// First-letter comparison: ci or exact.
    #[arg(long = "match")]
    pub match_rule: Option<String>,
    /// Let earlier expansions in a sentence inform later ones.
    #[arg(long)]
    pub cascade: bool,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalIdentArgs {
    /// Flag file written by `identify`.
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    /// Gold corpus files or directories.
    #[arg(long, value_name = "PATH", required = true)]
    pub gold: Vec<PathBuf>,
    #[arg(long, value_name = "FORMAT")]
    pub input_format: Option<String>,
    #[arg(long)]
    pub stream: Option<String>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalNerArgs {
    /// Predicted corpus files or directories.
    #[arg(long, value_name = "PATH", required = true)]
    pub pred: Vec<PathBuf>,
    #[arg(long, value_name = "PATH", required = true)]
    pub gold: Vec<PathBuf>,
    #[arg(long, value_name = "FORMAT")]
    pub input_format: Option<String>,
    #[arg(long)]
    pub stream: Option<String>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match cli.config.as_deref().map(config::ConfigFile::load).transpose() {
        Ok(file) => config::Settings::new(file),
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Stats(a) => commands::stats(a, &settings),
        Command::Split(a) => commands::split(a, &settings),
        Command::TrainBigrams(a) => commands::train_bigrams(a, &settings),
        Command::TrainClassifier(a) => commands::train_classifier(a, &settings),
        Command::Identify(a) => commands::identify(a, &settings),
        Command::Expand(a) => commands::expand(a, &settings),
        Command::EvalIdent(a) => commands::eval_ident(a, &settings),
        Command::EvalNer(a) => commands::eval_ner(a, &settings),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
