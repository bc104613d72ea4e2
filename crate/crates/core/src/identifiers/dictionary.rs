use super::{IdentificationResult, IdentifyError};
use crate::tokenization::DirtyToken;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CaseMode {
    #[default]
    Exact,
    /// Exact lookup first, then the lowercased form.
    Lower,
}

/// A word list: any stop-terminated token whose stem is missing from it is
/// treated as an abbreviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryResource {
    pub name: String,
    pub entries: HashSet<String>,
    pub case_mode: CaseMode,
}

impl DictionaryResource {
    pub fn new<I, S>(name: impl Into<String>, entries: I, case_mode: CaseMode) -> Result<Self, IdentifyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let entries: HashSet<String> = entries.into_iter().map(Into::into).collect();
        if entries.is_empty() {
            return Err(IdentifyError::EmptyDictionary(name));
        }
        Ok(DictionaryResource {
            name,
            entries,
            case_mode,
        })
    }

    /// One entry per line; blank lines and `#` comments are skipped.
    pub fn parse(name: impl Into<String>, text: &str, case_mode: CaseMode) -> Result<Self, IdentifyError> {
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        Self::new(name, entries, case_mode)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(word)
            || (self.case_mode == CaseMode::Lower && self.entries.contains(&word.to_lowercase()))
    }
}

pub fn dict_identify(tokens: &[DirtyToken], dict: &DictionaryResource) -> IdentificationResult {
    let flags = tokens
        .iter()
        .map(|t| t.ends_with_stop && !dict.contains(t.stem()))
        .collect();
    IdentificationResult::new(format!("dict:{}", dict.name), flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenization::dirty_tokenize;
    use proptest::prelude::*;

    fn dict(words: &[&str], mode: CaseMode) -> DictionaryResource {
        DictionaryResource::new("t", words.iter().copied(), mode).unwrap()
    }

    #[test]
    fn known_word_with_stop_is_not_flagged() {
        let r = dict_identify(&dirty_tokenize("prof. gl. Trstu"), &dict(&["prof", "Trstu"], CaseMode::Exact));
        assert_eq!(r.flags, vec![false, true, false]);
    }

    #[test]
    fn unterminated_tokens_are_skipped_regardless_of_dictionary() {
        let r = dict_identify(&dirty_tokenize("Trstu"), &dict(&["x"], CaseMode::Exact));
        assert_eq!(r.flags, vec![false]);
    }

    #[test]
    fn lowercase_second_chance() {
        let toks = dirty_tokenize("Leta.");
        assert_eq!(dict_identify(&toks, &dict(&["leta"], CaseMode::Exact)).flags, vec![true]);
        assert_eq!(dict_identify(&toks, &dict(&["leta"], CaseMode::Lower)).flags, vec![false]);
    }

    #[test]
    fn parse_file_format() {
        let d = DictionaryResource::parse("h", "# header\nleto\n\n  prof  \n", CaseMode::Exact).unwrap();
        assert_eq!(d.entries.len(), 2);
        assert!(d.contains("prof"));
        assert!(matches!(
            DictionaryResource::parse("e", "# only comments\n", CaseMode::Exact),
            Err(IdentifyError::EmptyDictionary(_))
        ));
    }

    proptest! {
        #[test]
        fn flags_invariant_under_unterminated_insertions(
            words in proptest::collection::vec("[a-c]{1,3}\\.?", 1..15),
            extra in proptest::collection::vec("[a-c]{1,3}", 0..6),
        ) {
            let d = dict(&["a", "bb", "abc"], CaseMode::Exact);
            let base = dict_identify(&dirty_tokenize(&words.join(" ")), &d).flags;
            let mixed = format!("{} {}", extra.join(" "), words.join(" "));
            let flags = dict_identify(&dirty_tokenize(&mixed), &d).flags;
            prop_assert!(flags[..extra.len()].iter().all(|f| !f));
            prop_assert_eq!(&flags[extra.len()..], &base[..]);
        }
    }
}
