use std::fmt;
use std::process::ExitCode;

/// A command failure, classified by the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad input, unreadable files, parse errors, bad configuration.
    Input(String),
    Training(String),
    /// Fill-mask provider or classification bridge errors.
    Provider(String),
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Input(_) => 2,
            Failure::Training(_) => 3,
            Failure::Provider(_) => 4,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Training(m) | Failure::Provider(m) => f.write_str(m),
        }
    }
}

impl From<abbrx::expansion::ExpansionError> for Failure {
    fn from(e: abbrx::expansion::ExpansionError) -> Self {
        use abbrx::expansion::ExpansionError::*;
        match e {
            ProviderUnavailable(_) | ProviderProtocol(_) | EmptyVocabulary => Failure::Provider(e.to_string()),
            MaskOutOfRange { .. } | InvalidTopK | MisalignedFlags { .. } => Failure::Input(e.to_string()),
        }
    }
}

impl From<abbrx::classifier::ClassifierError> for Failure {
    fn from(e: abbrx::classifier::ClassifierError) -> Self {
        use abbrx::classifier::ClassifierError::*;
        match e {
            BridgeUnavailable(_) | BridgeProtocolError(_) => Failure::Provider(e.to_string()),
            DegenerateTraining(_) | NoSeeds => Failure::Training(e.to_string()),
            ModelFormat { .. } => Failure::Input(e.to_string()),
        }
    }
}

impl From<abbrx::evaluation::EvalError> for Failure {
    fn from(e: abbrx::evaluation::EvalError) -> Self {
        use abbrx::evaluation::EvalError;
        match e {
            EvalError::UnalignedCorpora {
                missing_in_pred,
                missing_in_gold,
            } => Failure::Input(format!(
                "unaligned corpora\n  missing in predictions: {}\n  missing in gold: {}",
                list_keys(&missing_in_pred),
                list_keys(&missing_in_gold)
            )),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// `doc/3, doc/4, ... (N more)` with at most ten keys spelled out.
pub fn list_keys<K: fmt::Display, I: fmt::Display>(keys: &[(K, I)]) -> String {
    if keys.is_empty() {
        return "none".to_string();
    }
    let mut out: Vec<String> = keys.iter().take(10).map(|(d, i)| format!("{d}/{i}")).collect();
    if keys.len() > 10 {
        out.push(format!("... ({} more)", keys.len() - 10));
    }
    out.join(", ")
}
