use std::collections::BTreeSet;

/// Tokenizer settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Stopwords are carried here for title-term selection; [`tokenize`]
    /// itself never drops them.
    pub stopword_list: BTreeSet<String>,
    pub min_token_length: usize,
    pub keep_internal_hyphens: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            stopword_list: BTreeSet::new(),
            min_token_length: 1,
            keep_internal_hyphens: true,
        }
    }
}

/// Splits `text` into tokens.
///
/// Tokens are maximal runs of alphanumeric characters. A hyphen joins two runs
/// when `keep_internal_hyphens` is set and it sits directly between two
/// alphanumeric characters. Everything else is a separator.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let min_len = config.min_token_length.max(1);
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_len = 0usize;
    let mut chars = text.chars().peekable();

    let mut flush = |current: &mut String, current_len: &mut usize| {
        if *current_len >= min_len {
            tokens.push(std::mem::take(current));
        } else {
            current.clear();
        }
        *current_len = 0;
    };

    while let Some(c) = chars.next() {
        if c.is_alphanumeric() {
            if config.lowercase {
                current.extend(c.to_lowercase());
            } else {
                current.push(c);
            }
            current_len += 1;
        } else if c == '-'
            && config.keep_internal_hyphens
            && !current.is_empty()
            && chars.peek().is_some_and(|n| n.is_alphanumeric())
        {
            current.push('-');
            current_len += 1;
        } else if !current.is_empty() {
            flush(&mut current, &mut current_len);
        }
    }
    if !current.is_empty() {
        flush(&mut current, &mut current_len);
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text, &TokenizerConfig::default())
    }

    #[test]
    fn hyphenated_title() {
        assert_eq!(toks("Public-Key Cryptography."), vec!["public-key", "cryptography"]);
    }

    #[test]
    fn empty_text() {
        assert!(toks("").is_empty());
        assert!(toks("  ,;. -- ").is_empty());
    }

    #[test]
    fn dangling_hyphens_split() {
        assert_eq!(toks("-pre post- a--b x-"), vec!["pre", "post", "a", "b", "x"]);
        assert_eq!(toks("low-dimensional co-occurrence"), vec!["low-dimensional", "co-occurrence"]);
    }

    #[test]
    fn hyphens_dropped_when_disabled() {
        let config = TokenizerConfig { keep_internal_hyphens: false, ..TokenizerConfig::default() };
        assert_eq!(tokenize("Public-Key", &config), vec!["public", "key"]);
    }

    #[test]
    fn min_length_and_case() {
        let config = TokenizerConfig { lowercase: false, min_token_length: 3, ..TokenizerConfig::default() };
        assert_eq!(tokenize("A GPU is an ASIC", &config), vec!["GPU", "ASIC"]);
    }

    #[test]
    fn stopwords_are_kept() {
        let config =
            TokenizerConfig { stopword_list: ["the".to_string()].into_iter().collect(), ..TokenizerConfig::default() };
        assert_eq!(tokenize("The model", &config), vec!["the", "model"]);
    }

    #[test]
    fn unicode_letters() {
        assert_eq!(toks("Über naïve café's"), vec!["über", "naïve", "café", "s"]);
    }

    #[test]
    fn matches_hand_tokenized_fixture() {
        let text = include_str!("../../tests/fixtures/sample_doc.txt");
        let expected: Vec<String> =
            include_str!("../../tests/fixtures/sample_doc.tokens").lines().map(str::to_string).collect();
        assert_eq!(toks(text), expected);
    }
}
