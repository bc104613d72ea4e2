use crate::failure::Failure;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const KEYS: &[&str] = &[
    "method",
    "provider",
    "endpoint",
    "threshold",
    "top-k",
    "seed",
    "seeds",
    "dict",
    "dict-case",
    "out",
    "model",
    "lm-train",
    "split-spec",
    "unit",
    "type-key",
    "input-format",
    "stream",
    "format",
    "epochs",
    "learning-rate",
    "l2",
    "fold-case",
    "cascade",
    "match",
    "splits",
    "train",
    "dev",
    "test",
];

pub const HELP: &str = "\
CONFIG FILE
  --config FILE reads flat `key = value` lines. Blank lines and lines
  starting with `#` are ignored. Keys are long flag names without the
  leading dashes, for example:

      method = bigram+dict
      dict = lexicon.txt, names.txt
      threshold = 0.8
      top-k = 5
      seeds = 1..5

  List-valued keys (dict, seeds, lm-train) take comma-separated values.
  Command-line flags override the file; the file overrides defaults.

EXIT CODES
  0 success, 2 input or parse error, 3 training error, 4 provider error";

#[derive(Debug, Default)]
pub struct ConfigFile {
    path: PathBuf,
    values: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::input(format!("{}:{line_no}: expected `key = value`", path.display())));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Failure::input(format!("{}:{line_no}: unknown key {key:?}", path.display())));
            }
            values.insert(key.to_string(), (value.trim().to_string(), line_no));
        }
        Ok(ConfigFile {
            path: path.to_path_buf(),
            values,
        })
    }
}

/// Resolves settings as flag, then config file, then default.
#[derive(Debug, Default)]
pub struct Settings {
    file: Option<ConfigFile>,
}

impl Settings {
    pub fn new(file: Option<ConfigFile>) -> Self {
        Settings { file }
    }

    fn raw(&self, key: &str) -> Option<(&str, String)> {
        let file = self.file.as_ref()?;
        let (value, line) = file.values.get(key)?;
        Some((value.as_str(), format!("{}:{line}", file.path.display())))
    }

    pub fn get<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some((value, at)) => value
                .parse()
                .map(Some)
                .map_err(|e| Failure::input(format!("{at}: invalid {key} {value:?}: {e}"))),
        }
    }

    pub fn get_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, Failure> {
        Ok(flag || self.get(None::<bool>, key)?.unwrap_or(false))
    }

    pub fn list<T>(&self, flag: Vec<T>, key: &str) -> Result<Vec<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        if !flag.is_empty() {
            return Ok(flag);
        }
        let Some((value, at)) = self.raw(key) else { return Ok(Vec::new()) };
        value
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| v.parse().map_err(|e| Failure::input(format!("{at}: invalid {key} {v:?}: {e}"))))
            .collect()
    }
}

/// Seed lists: `1,2,3` or the inclusive range `1..5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

impl FromStr for SeedList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |_| format!("expected a seed list like 1,2,3 or 1..5, got {s:?}");
        if let Some((a, b)) = s.split_once("..") {
            let (a, b): (u64, u64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
            if a > b {
                return Err(format!("empty seed range {s:?}"));
            }
            return Ok(SeedList((a..=b).collect()));
        }
        s.split(',')
            .map(|v| v.trim().parse().map_err(bad))
            .collect::<Result<Vec<_>, _>>()
            .map(SeedList)
    }
}
