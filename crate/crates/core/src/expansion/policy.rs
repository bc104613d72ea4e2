use super::{fill_mask, ExpansionError, FillCandidate, FillMaskProvider};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MatchRule {
    /// Compare lowercased first letters.
    #[default]
    FirstLetterCaseInsensitive,
    FirstLetterExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NoMatch {
    #[default]
    KeepOriginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionPolicy {
    pub top_k: usize,
    pub match_rule: MatchRule,
    pub on_no_match: NoMatch,
    /// Mask later abbreviations against already expanded context.
    pub cascade: bool,
}

impl Default for ExpansionPolicy {
    fn default() -> Self {
        ExpansionPolicy {
            top_k: 5,
            match_rule: MatchRule::default(),
            on_no_match: NoMatch::KeepOriginal,
            cascade: false,
        }
    }
}

/// An accepted candidate and its 0-based rank in the provider list.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub token: String,
    pub rank: usize,
    pub score: f64,
}

/// The first alphabetic character, skipping leading punctuation such as `(`.
pub fn first_letter(abbreviation: &str) -> Option<char> {
    abbreviation.chars().find(|c| c.is_alphabetic())
}

fn same_letter(a: char, b: char, rule: MatchRule) -> bool {
    match rule {
        MatchRule::FirstLetterExact => a == b,
        MatchRule::FirstLetterCaseInsensitive => a.to_lowercase().eq(b.to_lowercase()),
    }
}

/// Lowest-ranked candidate among the first `top_k` whose first character is
/// the abbreviation's first letter. `candidates` must already be ranked.
pub fn select_expansion<'a>(
    abbreviation: &str,
    candidates: &'a [FillCandidate],
    policy: &ExpansionPolicy,
) -> Option<(usize, &'a FillCandidate)> {
    let letter = first_letter(abbreviation)?;
    candidates
        .iter()
        .take(policy.top_k)
        .enumerate()
        .find(|(_, c)| {
            c.token
                .chars()
                .next()
                .is_some_and(|first| same_letter(letter, first, policy.match_rule))
        })
}

/// Masks `tokens[position]` and applies the acceptance rule. `None` means
/// the original abbreviation is kept.
pub fn expand_candidate(
    tokens: &[String],
    position: usize,
    policy: &ExpansionPolicy,
    provider: &dyn FillMaskProvider,
) -> Result<Option<Expansion>, ExpansionError> {
    let candidates = fill_mask(provider, tokens, position, policy.top_k)?;
    Ok(select_expansion(&tokens[position], &candidates, policy).map(|(rank, c)| Expansion {
        token: c.token.clone(),
        rank,
        score: c.score,
    }))
}

#[cfg(test)]
mod tests {
    use super::super::testing::FixedProvider;
    use super::*;
    use proptest::prelude::*;

    fn ctx(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn rank_one_match() {
        let p = FixedProvider::new(&[("leta", 0.4), ("v", 0.3), ("je", 0.2)]);
        let e = expand_candidate(&ctx("rojen l. 1881"), 1, &ExpansionPolicy::default(), &p).unwrap();
        assert_eq!(e.map(|e| (e.token, e.rank)), Some(("leta".to_string(), 0)));
    }

    #[test]
    fn no_match_keeps_original() {
        let p = FixedProvider::new(&[("je", 0.5), ("v", 0.4), ("na", 0.3), ("leta", 0.2), ("bil", 0.1)]);
        let e = expand_candidate(&ctx("gl. spodaj"), 0, &ExpansionPolicy::default(), &p).unwrap();
        assert_eq!(e, None);
    }

    #[test]
    fn match_need_not_be_first() {
        let p = FixedProvider::new(&[("in", 0.6), ("umrl", 0.3)]);
        let e = expand_candidate(&ctx("u. 1950"), 0, &ExpansionPolicy::default(), &p).unwrap();
        assert_eq!(e.map(|e| (e.token, e.rank)), Some(("umrl".to_string(), 1)));
    }

    #[test]
    fn case_rules() {
        let cands = vec![FillCandidate::new("doktor", 1.0)];
        let ci = ExpansionPolicy::default();
        assert!(select_expansion("Dr.", &cands, &ci).is_some());
        let exact = ExpansionPolicy { match_rule: MatchRule::FirstLetterExact, ..ci };
        assert!(select_expansion("Dr.", &cands, &exact).is_none());
        assert!(select_expansion("(d.", &cands, &exact).is_some());
        assert!(select_expansion("Č.", &[FillCandidate::new("člen", 1.0)], &ci).is_some());
        assert!(select_expansion("1.", &cands, &ci).is_none());
    }

    #[test]
    fn beyond_top_k_is_ignored() {
        let cands: Vec<_> = ["a", "b", "c", "d", "e", "leta"].iter().map(|t| FillCandidate::new(*t, 0.1)).collect();
        assert!(select_expansion("l.", &cands, &ExpansionPolicy::default()).is_none());
        let wide = ExpansionPolicy { top_k: 6, ..ExpansionPolicy::default() };
        assert_eq!(select_expansion("l.", &cands, &wide).unwrap().0, 5);
    }

    proptest! {
        #[test]
        fn minimal_rank_matching(
            abbr in "[a-dA-D][a-z]{0,2}\\.",
            toks in proptest::collection::vec("[a-fA-F][a-z]{0,4}", 0..10),
            top_k in 1usize..8,
        ) {
            let cands: Vec<_> = toks.iter().enumerate().map(|(i, t)| FillCandidate::new(t.clone(), 1.0 / (i + 1) as f64)).collect();
            let policy = ExpansionPolicy { top_k, ..ExpansionPolicy::default() };
            let letter = abbr.chars().next().unwrap().to_lowercase().next().unwrap();
            let brute = cands.iter().take(top_k).position(|c| c.token.chars().next().unwrap().to_lowercase().next().unwrap() == letter);
            let got = select_expansion(&abbr, &cands, &policy).map(|(r, _)| r);
            prop_assert_eq!(got, brute);
            if let Some(r) = got { prop_assert!(r < top_k); }
        }
    }
}
