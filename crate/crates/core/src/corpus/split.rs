//! Seeded train/dev/test splitting with largest-remainder rounding.

use super::{Document, Sentence};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("cannot split an empty corpus")]
    EmptyCorpus,
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SplitUnit {
    #[default]
    Sentence,
    Document,
}

/// Split proportions as integer parts of a common whole, so `70/10/20`
/// and `0.7/0.1/0.2` describe the same exact rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    parts: [u64; 3],
    pub seed: u64,
    pub unit: SplitUnit,
}

impl SplitSpec {
    pub fn new(train: u64, dev: u64, test: u64, seed: u64) -> Result<Self, SplitError> {
        if train + dev + test == 0 {
            return Err(SplitError::InvalidFractions("all parts are zero".into()));
        }
        Ok(SplitSpec {
            parts: [train, dev, test],
            seed,
            unit: SplitUnit::Sentence,
        })
    }

    /// Fractions must be non-negative and sum to 1 within 1e-9. They are
    /// converted to parts per million.
    pub fn from_fractions(train: f64, dev: f64, test: f64, seed: u64) -> Result<Self, SplitError> {
        let fr = [train, dev, test];
        if fr.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(SplitError::InvalidFractions(format!("{fr:?} must be non-negative")));
        }
        if (fr.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(SplitError::InvalidFractions(format!("{fr:?} do not sum to 1")));
        }
        let p = fr.map(|f| (f * 1e6).round() as u64);
        Self::new(p[0], p[1], p[2], seed)
    }

    /// Parses `a/b/c` (parts or fractions).
    pub fn parse(text: &str, seed: u64) -> Result<Self, SplitError> {
        let bad = || SplitError::InvalidFractions(format!("{text:?} is not of the form a/b/c"));
        let values: Vec<f64> = text
            .split('/')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [a, b, c] = values[..] else { return Err(bad()) };
        if [a, b, c].iter().all(|v| v.fract() == 0.0 && *v >= 0.0) && a + b + c > 1.0 {
            Self::new(a as u64, b as u64, c as u64, seed)
        } else {
            Self::from_fractions(a, b, c, seed)
        }
    }

    pub fn with_unit(mut self, unit: SplitUnit) -> Self {
        self.unit = unit;
        self
    }

    pub fn parts(&self) -> [u64; 3] {
        self.parts
    }

    /// Sizes for `n` units. Each split gets the floor of its exact quota;
    /// the leftover units go to the largest remainders. Equal remainders
    /// favour the split with the smaller share, then the later split.
    pub fn allocate(&self, n: usize) -> [usize; 3] {
        let total: u128 = self.parts.iter().map(|&p| p as u128).sum();
        let n = n as u128;
        let mut sizes = [0usize; 3];
        let mut rems = [0u128; 3];
        for i in 0..3 {
            let q = n * self.parts[i] as u128;
            sizes[i] = (q / total) as usize;
            rems[i] = q % total;
        }
        let assigned: usize = sizes.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            rems[b]
                .cmp(&rems[a])
                .then(self.parts[a].cmp(&self.parts[b]))
                .then(b.cmp(&a))
        });
        for &i in order.iter().take(n as usize - assigned) {
            sizes[i] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Splits {
    pub train: Vec<Sentence>,
    pub dev: Vec<Sentence>,
    pub test: Vec<Sentence>,
}

impl Splits {
    pub fn named(&self) -> [(&'static str, &[Sentence]); 3] {
        [("train", &self.train), ("dev", &self.dev), ("test", &self.test)]
    }
}

/// Shuffles units with a seeded ChaCha8 generator and cuts the permutation
/// into consecutive train/dev/test blocks. Within a split, sentences keep
/// corpus order.
pub fn split_corpus(docs: &[Document], spec: &SplitSpec) -> Result<Splits, SplitError> {
    let units: Vec<Vec<&Sentence>> = match spec.unit {
        SplitUnit::Sentence => docs
            .iter()
            .flat_map(|d| &d.sentences)
            .map(|s| vec![s])
            .collect(),
        SplitUnit::Document => docs
            .iter()
            .filter(|d| !d.sentences.is_empty())
            .map(|d| d.sentences.iter().collect())
            .collect(),
    };
    if units.is_empty() {
        return Err(SplitError::EmptyCorpus);
    }
    let mut order: Vec<usize> = (0..units.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let [n_train, n_dev, _] = spec.allocate(units.len());
    let mut assigned = vec![0u8; units.len()];
    for (rank, &u) in order.iter().enumerate() {
        assigned[u] = match rank {
            r if r < n_train => 0,
            r if r < n_train + n_dev => 1,
            _ => 2,
        };
    }
    let mut splits = Splits::default();
    for (unit, &which) in units.iter().zip(&assigned) {
        let target = match which {
            0 => &mut splits.train,
            1 => &mut splits.dev,
            _ => &mut splits.test,
        };
        target.extend(unit.iter().map(|s| (*s).clone()));
    }
    Ok(splits)
}
