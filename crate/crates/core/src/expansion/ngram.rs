use super::{rank_order, ExpansionError, FillCandidate, FillMaskProvider};
use crate::tokenization::{has_alphanumeric, split_edge_punctuation};
use std::collections::{BTreeSet, HashMap};

const BOS: &str = "<s>";
const EOS: &str = "</s>";

/// Mixture weights of the five context estimates. Normalized on use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationWeights {
    pub left2: f64,
    pub left1: f64,
    pub unigram: f64,
    pub right1: f64,
    pub right2: f64,
}

impl Default for InterpolationWeights {
    fn default() -> Self {
        InterpolationWeights {
            left2: 0.15,
            left1: 0.25,
            unigram: 0.2,
            right1: 0.25,
            right2: 0.15,
        }
    }
}

impl InterpolationWeights {
    fn normalized(self) -> [f64; 5] {
        let w = [self.left2, self.left1, self.unigram, self.right1, self.right2].map(|x| x.max(0.0));
        let sum: f64 = w.iter().sum();
        if sum > 0.0 {
            w.map(|x| x / sum)
        } else {
            [0.2; 5]
        }
    }
}

type Key = Vec<String>;

#[derive(Debug, Default, Clone)]
struct Table {
    joint: HashMap<Key, u64>,
    context: HashMap<Key, u64>,
}

impl Table {
    fn add(&mut self, context: &[&str], word: &str) {
        let ctx: Key = context.iter().map(|s| s.to_string()).collect();
        let mut joint = ctx.clone();
        joint.push(word.to_string());
        *self.joint.entry(joint).or_default() += 1;
        *self.context.entry(ctx).or_default() += 1;
    }

    /// Add-one estimate of `word` given `context`, normalized over `v` words.
    fn prob(&self, context: &[&str], word: &str, v: f64) -> f64 {
        let mut key: Key = context.iter().map(|s| s.to_string()).collect();
        let c_ctx = self.context.get(&key).copied().unwrap_or(0) as f64;
        key.push(word.to_string());
        let c = self.joint.get(&key).copied().unwrap_or(0) as f64;
        (c + 1.0) / (c_ctx + v)
    }
}

/// Native fill-mask provider: an interpolated, add-one smoothed model of a
/// word given up to two words on either side. Candidates are the word
/// types of the training text.
#[derive(Debug, Clone)]
pub struct NgramContextModel {
    vocab: BTreeSet<String>,
    fold_case: bool,
    weights: InterpolationWeights,
    left2: Table,
    left1: Table,
    unigram: Table,
    right1: Table,
    right2: Table,
}

fn split_context(tokens: &[String], fold_case: bool) -> Vec<String> {
    tokens
        .iter()
        .flat_map(|t| split_edge_punctuation(t))
        .map(|s| if fold_case { s.to_lowercase() } else { s.to_string() })
        .collect()
}

impl NgramContextModel {
    /// Trains on already tokenized sentences of expanded text.
    pub fn train(sentences: &[Vec<String>]) -> Self {
        Self::train_with(sentences, InterpolationWeights::default(), false)
    }

    pub fn train_with(sentences: &[Vec<String>], weights: InterpolationWeights, fold_case: bool) -> Self {
        let mut m = NgramContextModel {
            vocab: BTreeSet::new(),
            fold_case,
            weights,
            left2: Table::default(),
            left1: Table::default(),
            unigram: Table::default(),
            right1: Table::default(),
            right2: Table::default(),
        };
        for sentence in sentences {
            let words = split_context(sentence, fold_case);
            let mut padded: Vec<&str> = vec![BOS, BOS];
            padded.extend(words.iter().map(String::as_str));
            padded.extend([EOS, EOS]);
            for i in 2..padded.len() - 2 {
                let w = padded[i];
                if !has_alphanumeric(w) {
                    continue;
                }
                m.vocab.insert(w.to_string());
                m.left2.add(&padded[i - 2..i], w);
                m.left1.add(&padded[i - 1..i], w);
                m.unigram.add(&[], w);
                m.right1.add(&padded[i + 1..i + 2], w);
                m.right2.add(&padded[i + 1..i + 3], w);
            }
        }
        m
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    /// Probability of `word` filling the gap between `left` and `right`
    /// (nearest context word first). Sums to one over the vocabulary.
    pub fn score(&self, left: [&str; 2], word: &str, right: [&str; 2]) -> f64 {
        let v = self.vocab.len() as f64;
        let [a, b, c, d, e] = self.weights.normalized();
        a * self.left2.prob(&[left[1], left[0]], word, v)
            + b * self.left1.prob(&[left[0]], word, v)
            + c * self.unigram.prob(&[], word, v)
            + d * self.right1.prob(&[right[0]], word, v)
            + e * self.right2.prob(&[right[0], right[1]], word, v)
    }
}

impl FillMaskProvider for NgramContextModel {
    fn fill_mask(&self, tokens: &[String], mask_index: usize, top_k: usize) -> Result<Vec<FillCandidate>, ExpansionError> {
        if self.vocab.is_empty() {
            return Err(ExpansionError::EmptyVocabulary);
        }
        if mask_index >= tokens.len() {
            return Err(ExpansionError::MaskOutOfRange {
                index: mask_index,
                len: tokens.len(),
            });
        }
        let before = split_context(&tokens[..mask_index], self.fold_case);
        let after = split_context(&tokens[mask_index + 1..], self.fold_case);
        let at = |v: &[String], i: Option<usize>, pad: &'static str| -> String {
            i.and_then(|i| v.get(i)).cloned().unwrap_or_else(|| pad.to_string())
        };
        let l0 = at(&before, before.len().checked_sub(1), BOS);
        let l1 = at(&before, before.len().checked_sub(2), BOS);
        let r0 = at(&after, Some(0), EOS);
        let r1 = at(&after, Some(1), EOS);
        let mut out: Vec<FillCandidate> = self
            .vocab
            .iter()
            .map(|w| FillCandidate::new(w.clone(), self.score([&l0, &l1], w, [&r0, &r1])))
            .collect();
        out.sort_by(rank_order);
        out.truncate(top_k);
        Ok(out)
    }
}
