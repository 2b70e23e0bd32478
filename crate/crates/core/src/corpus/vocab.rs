use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::warn;

use super::{FieldCorpus, FieldId};
use crate::error::{Error, Result};

/// Per-field title term lists and their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermVocab {
    pub per_field: BTreeMap<FieldId, Vec<String>>,
    pub union: BTreeSet<String>,
}

/// Counts tokens and returns `(token, count)` sorted by count descending,
/// ties broken lexicographically.
fn ranked_counts<'a>(tokens: impl Iterator<Item = &'a String>) -> Vec<(&'a str, u64)> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let mut ranked: Vec<_> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
}

/// Selects the `n` most frequent non-stopword title tokens of every field.
pub fn build_term_vocab(corpora: &[FieldCorpus], stopwords: &BTreeSet<String>, n: usize) -> Result<TermVocab> {
    if n == 0 {
        return Err(Error::Invalid("terms per field must be at least 1".into()));
    }
    let mut per_field = BTreeMap::new();
    let mut union = BTreeSet::new();
    for corpus in corpora {
        if corpus.title_tokens.is_empty() {
            return Err(Error::Invalid(format!("field {} has no title tokens", corpus.field)));
        }
        let ranked = ranked_counts(corpus.title_tokens.iter().filter(|t| !stopwords.contains(t.as_str())));
        if ranked.len() < n {
            warn!("field {} has only {} distinct title terms (wanted {n})", corpus.field, ranked.len());
        }
        let list: Vec<String> = ranked.into_iter().take(n).map(|(t, _)| t.to_string()).collect();
        union.extend(list.iter().cloned());
        per_field.insert(corpus.field.clone(), list);
    }
    Ok(TermVocab { per_field, union })
}

/// Every body token seen at least `min_count` times overall, minus the
/// field terms.
pub fn build_global_vocab(
    corpora: &[FieldCorpus],
    field_terms: &BTreeSet<String>,
    min_count: u64,
) -> Result<BTreeSet<String>> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for t in corpora.iter().flat_map(|c| c.body_tokens.iter()) {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let global: BTreeSet<String> = counts
        .into_iter()
        .filter(|&(t, c)| c >= min_count && !field_terms.contains(t))
        .map(|(t, _)| t.to_string())
        .collect();
    if global.is_empty() {
        return Err(Error::EmptyGlobalVocab);
    }
    Ok(global)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(field: &str, body: &str, titles: &str) -> FieldCorpus {
        FieldCorpus {
            field: FieldId::new(field).unwrap(),
            body_tokens: body.split_whitespace().map(String::from).collect(),
            title_tokens: titles.split_whitespace().map(String::from).collect(),
        }
    }

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn most_frequent_title_token() {
        let c = vec![corpus("a", "z", "x x y")];
        let vocab = build_term_vocab(&c, &BTreeSet::new(), 1).unwrap();
        assert_eq!(vocab.per_field[&FieldId::new("a").unwrap()], vec!["x"]);
    }

    #[test]
    fn ties_are_lexicographic_and_stopwords_dropped() {
        let c = vec![corpus("a", "z", "of b a of c of"), corpus("b", "z", "q p")];
        let vocab = build_term_vocab(&c, &set(&["of"]), 2).unwrap();
        assert_eq!(vocab.per_field[&FieldId::new("a").unwrap()], vec!["a", "b"]);
        assert_eq!(vocab.per_field[&FieldId::new("b").unwrap()], vec!["p", "q"]);
        assert_eq!(vocab.union, set(&["a", "b", "p", "q"]));
    }

    #[test]
    fn short_title_lists_take_everything() {
        let c = vec![corpus("a", "z", "x y")];
        let vocab = build_term_vocab(&c, &BTreeSet::new(), 200).unwrap();
        assert_eq!(vocab.union.len(), 2);
    }

    #[test]
    fn zero_terms_rejected() {
        let c = vec![corpus("a", "z", "x")];
        assert!(build_term_vocab(&c, &BTreeSet::new(), 0).is_err());
    }

    #[test]
    fn global_vocab_is_disjoint_from_terms() {
        let c = vec![corpus("a", "a b a", "b")];
        let global = build_global_vocab(&c, &set(&["b"]), 1).unwrap();
        assert_eq!(global, set(&["a"]));
    }

    #[test]
    fn global_vocab_threshold_boundary() {
        let c = vec![corpus("a", "x x x y y", "t"), corpus("b", "x y", "t")];
        let global = build_global_vocab(&c, &BTreeSet::new(), 4).unwrap();
        assert_eq!(global, set(&["x"]));
        let global = build_global_vocab(&c, &BTreeSet::new(), 3).unwrap();
        assert_eq!(global, set(&["x", "y"]));
    }

    #[test]
    fn empty_global_vocab_is_an_error() {
        let c = vec![corpus("a", "b", "b")];
        assert!(matches!(build_global_vocab(&c, &set(&["b"]), 1), Err(Error::EmptyGlobalVocab)));
    }
}
