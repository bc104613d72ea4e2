use crate::tokenization::DirtyToken;
use std::collections::BTreeMap;

pub const BOUNDARY_START: char = '^';
pub const BOUNDARY_END: char = '$';
const MAX_LENGTH_BUCKET: usize = 12;

/// Context-free features of one dirty token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenFeatures {
    /// Boundary-marked character n-grams (n = 1..=3) with their counts.
    pub char_ngrams: BTreeMap<String, u32>,
    pub length: usize,
    pub has_upper: bool,
    pub all_upper: bool,
    pub has_digit: bool,
    pub ends_with_stop: bool,
    pub has_interior_stop: bool,
}

impl TokenFeatures {
    /// Sparse `(feature name, value)` pairs in a fixed order.
    pub fn named(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self
            .char_ngrams
            .iter()
            .map(|(g, c)| (format!("c{}:{g}", g.chars().count()), f64::from(*c)))
            .collect();
        out.push((format!("len={}", self.length.min(MAX_LENGTH_BUCKET)), 1.0));
        for (name, on) in [
            ("has_upper", self.has_upper),
            ("all_upper", self.all_upper),
            ("has_digit", self.has_digit),
            ("ends_with_stop", self.ends_with_stop),
            ("has_interior_stop", self.has_interior_stop),
        ] {
            if on {
                out.push((name.to_string(), 1.0));
            }
        }
        out
    }
}

pub fn extract_features(token: &DirtyToken) -> TokenFeatures {
    let raw = &token.raw;
    let marked: Vec<char> = std::iter::once(BOUNDARY_START)
        .chain(raw.chars())
        .chain(std::iter::once(BOUNDARY_END))
        .collect();
    let mut char_ngrams = BTreeMap::new();
    for n in 1..=3 {
        for w in marked.windows(n) {
            // Unigrams of the sentinels carry no information.
            if n == 1 && (w[0] == BOUNDARY_START || w[0] == BOUNDARY_END) {
                continue;
            }
            *char_ngrams.entry(w.iter().collect::<String>()).or_insert(0) += 1;
        }
    }
    let letters: Vec<char> = raw.chars().filter(|c| c.is_alphabetic()).collect();
    let stops = token.clean.matches('.').count();
    TokenFeatures {
        char_ngrams,
        length: raw.chars().count(),
        has_upper: letters.iter().any(|c| c.is_uppercase()),
        all_upper: !letters.is_empty() && letters.iter().all(|c| c.is_uppercase()),
        has_digit: raw.chars().any(|c| c.is_numeric()),
        ends_with_stop: token.ends_with_stop,
        has_interior_stop: stops > usize::from(token.ends_with_stop),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenization::dirty_tokenize;

    fn feats(s: &str) -> TokenFeatures {
        extract_features(&dirty_tokenize(s)[0])
    }

    #[test]
    fn abbreviation_token() {
        let f = feats("l.");
        assert!(f.ends_with_stop);
        assert_eq!(f.length, 2);
        assert!(f.char_ngrams.contains_key("^l"));
        assert!(f.char_ngrams.contains_key("l."));
        assert!(f.char_ngrams.contains_key(".$"));
        assert!(!f.has_interior_stop);
    }

    #[test]
    fn number_token() {
        let f = feats("1881");
        assert!(f.has_digit);
        assert!(!f.ends_with_stop);
        assert_eq!(f.char_ngrams["1"], 2);
    }

    #[test]
    fn context_free() {
        let a = dirty_tokenize("Rojen dr. Novak");
        let b = dirty_tokenize("Tam je dr. Kos");
        assert_eq!(extract_features(&a[1]), extract_features(&b[2]));
    }

    #[test]
    fn casing_and_interior_stops() {
        let f = feats("SAZU");
        assert!(f.has_upper && f.all_upper);
        let f = feats("n.pr.");
        assert!(f.has_interior_stop && f.ends_with_stop);
        assert!(!feats("123").all_upper);
    }
}
