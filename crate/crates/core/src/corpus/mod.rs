//! Field-partitioned corpus ingestion and the dual vocabulary.
//!
//! Layout on disk:
//!
//! ```text
//! <root>/<field>/papers/*.txt   one document per file
//! <root>/<field>/titles.txt     one title per line
//! ```

mod counts;
mod lexicon;
mod tokenize;
mod vocab;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use counts::{resolve_corpora, ResolvedCorpus, SlotCounts};
pub use lexicon::{Lexicon, Scope, SlotId};
pub use tokenize::{tokenize, TokenizerConfig};
pub use vocab::{build_global_vocab, build_term_vocab, TermVocab};

/// Scope name reserved for global words in every export.
pub const GLOBAL_SCOPE: &str = "GLOBAL";

/// Name of a research field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldId(String);

impl FieldId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name == GLOBAL_SCOPE || name.chars().any(|c| c.is_whitespace() || c == ',' || c == '-') {
            return Err(Error::InvalidField(name));
        }
        Ok(FieldId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for FieldId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// One field's share of the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCorpus {
    pub field: FieldId,
    pub body_tokens: Vec<String>,
    pub title_tokens: Vec<String>,
}

/// Reads every field directory under `root`.
///
/// Fields come back sorted by name and documents within a field are
/// concatenated in filename order, so repeated runs see identical streams.
pub fn ingest_corpus(root: &Path, config: &TokenizerConfig) -> Result<Vec<FieldCorpus>> {
    let mut field_dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if path.is_dir() && !name.starts_with('.') {
            field_dirs.push((name, path));
        }
    }
    field_dirs.sort();
    if field_dirs.len() < 2 {
        return Err(Error::TooFewFields(field_dirs.len()));
    }

    field_dirs.into_iter().map(|(name, dir)| ingest_field(FieldId::new(name)?, &dir, config)).collect()
}

fn ingest_field(field: FieldId, dir: &Path, config: &TokenizerConfig) -> Result<FieldCorpus> {
    let titles_path = dir.join("titles.txt");
    if !titles_path.is_file() {
        return Err(Error::MissingTitles(field.to_string()));
    }
    let docs = list_documents(&dir.join("papers"))?;
    if docs.is_empty() {
        return Err(Error::NoDocuments(field.to_string()));
    }

    let per_doc: Vec<Vec<String>> = docs
        .par_iter()
        .map(|path| {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Ok(tokenize(&text, config))
        })
        .collect::<Result<_>>()?;
    let body_tokens: Vec<String> = per_doc.into_iter().flatten().collect();
    if body_tokens.is_empty() {
        return Err(Error::EmptyField(field.to_string()));
    }

    let titles = fs::read_to_string(&titles_path).map_err(|e| Error::io(&titles_path, e))?;
    let title_tokens = titles.lines().flat_map(|line| tokenize(line, config)).collect();

    Ok(FieldCorpus { field, body_tokens, title_tokens })
}

fn list_documents(papers: &Path) -> Result<Vec<PathBuf>> {
    if !papers.is_dir() {
        return Ok(Vec::new());
    }
    let mut docs = Vec::new();
    for entry in fs::read_dir(papers).map_err(|e| Error::io(papers, e))? {
        let path = entry.map_err(|e| Error::io(papers, e))?.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "txt") {
            docs.push(path);
        }
    }
    docs.sort();
    Ok(docs)
}

/// Reads a stopword file: one surface form per line, blank lines ignored.
pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(path: &Path, text: &str) {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, text).unwrap();
    }

    fn two_field_tree(root: &Path) {
        write(&root.join("a/titles.txt"), "Alpha Beta\n");
        write(&root.join("a/papers/02.txt"), "second doc");
        write(&root.join("a/papers/01.txt"), "first doc");
        write(&root.join("b/titles.txt"), "Gamma\n");
        write(&root.join("b/papers/x.txt"), "only one");
        write(&root.join("b/papers/y.txt"), "and two");
    }

    #[test]
    fn field_ids() {
        assert!(FieldId::new("nlp").is_ok());
        assert!(FieldId::new("").is_err());
        assert!(FieldId::new("GLOBAL").is_err());
        assert!(FieldId::new("a b").is_err());
    }

    #[test]
    fn ingests_in_filename_order() {
        let dir = tempfile::tempdir().unwrap();
        two_field_tree(dir.path());
        let corpora = ingest_corpus(dir.path(), &TokenizerConfig::default()).unwrap();
        assert_eq!(corpora.len(), 2);
        assert_eq!(corpora[0].field.as_str(), "a");
        assert_eq!(corpora[0].body_tokens, vec!["first", "doc", "second", "doc"]);
        assert_eq!(corpora[0].title_tokens, vec!["alpha", "beta"]);
        assert_eq!(corpora[1].body_tokens, vec!["only", "one", "and", "two"]);
    }

    #[test]
    fn missing_titles_names_field() {
        let dir = tempfile::tempdir().unwrap();
        two_field_tree(dir.path());
        fs::remove_file(dir.path().join("b/titles.txt")).unwrap();
        let err = ingest_corpus(dir.path(), &TokenizerConfig::default()).unwrap_err();
        assert_eq!(err.to_string(), "missing titles for field b");
    }

    #[test]
    fn field_without_documents() {
        let dir = tempfile::tempdir().unwrap();
        two_field_tree(dir.path());
        fs::remove_dir_all(dir.path().join("b/papers")).unwrap();
        fs::create_dir_all(dir.path().join("b/papers")).unwrap();
        let err = ingest_corpus(dir.path(), &TokenizerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoDocuments(ref f) if f == "b"));
    }

    #[test]
    fn needs_two_fields() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("a/titles.txt"), "x\n");
        write(&dir.path().join("a/papers/1.txt"), "x");
        assert!(matches!(ingest_corpus(dir.path(), &TokenizerConfig::default()), Err(Error::TooFewFields(1))));
    }

    #[test]
    fn stopword_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stop.txt");
        fs::write(&path, "the\n\n  of \n").unwrap();
        let stop = load_stopwords(&path).unwrap();
        assert_eq!(stop.into_iter().collect::<Vec<_>>(), vec!["of", "the"]);
    }
}
