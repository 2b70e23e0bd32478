//! Synthetic field-partitioned corpora with planted stable and divergent
//! terms, for tests and demonstrations.
//!
//! Each document is a run of topic segments. Inside a segment every token is
//! a filler word (at `filler_rate`), a planted term whose topic in this field
//! is the segment's topic (at `planted_rate`), or a word of the segment's
//! topic.
//!
//! ```toml
//! fields = ["a", "b"]
//! tokens_per_field = 20000
//! docs = 20
//!
//! [[topic]]
//! name = "fruit"
//! size = 200
//! fields = ["a"]
//!
//! [[divergent]]
//! term = "apple"
//! topics = { a = "fruit", b = "tech" }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::corpus::{tokenize, FieldCorpus, FieldId, TokenizerConfig};
use crate::error::{Error, Result};
use crate::fmt::write_atomic;

fn default_segment_len() -> usize {
    50
}

fn default_filler_words() -> Vec<String> {
    ["the", "of", "and", "a", "in", "to", "is", "for", "on", "with"].map(String::from).to_vec()
}

fn default_filler_rate() -> f64 {
    0.2
}

fn default_planted_rate() -> f64 {
    0.02
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicSpec {
    pub name: String,
    /// Generates `size` words `<name>000`, `<name>001`, ...
    #[serde(default)]
    pub size: Option<usize>,
    /// Explicit word list, instead of `size`.
    #[serde(default)]
    pub words: Option<Vec<String>>,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableSpec {
    pub term: String,
    /// Topic used in every field.
    pub topic: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergentSpec {
    pub term: String,
    /// Field name to a topic exclusive to that field.
    pub topics: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub fields: Vec<String>,
    pub tokens_per_field: usize,
    pub docs: usize,
    #[serde(default = "default_segment_len")]
    pub segment_len: usize,
    #[serde(default = "default_filler_words")]
    pub filler_words: Vec<String>,
    #[serde(default = "default_filler_rate")]
    pub filler_rate: f64,
    #[serde(default = "default_planted_rate")]
    pub planted_rate: f64,
    #[serde(default, rename = "topic")]
    pub topics: Vec<TopicSpec>,
    #[serde(default)]
    pub stable: Vec<StableSpec>,
    #[serde(default)]
    pub divergent: Vec<DivergentSpec>,
}

impl SynthSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse("synth spec", e.to_string()))
    }
}

/// One field's generated documents and titles, tokens already final.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthField {
    pub field: FieldId,
    pub docs: Vec<Vec<String>>,
    pub titles: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub fields: Vec<SynthField>,
    pub filler_words: Vec<String>,
    pub stable_terms: Vec<String>,
    pub divergent_terms: Vec<String>,
}

/// Validated spec with topic words expanded and planted terms routed.
struct Plan {
    fields: Vec<FieldId>,
    topic_words: BTreeMap<String, Vec<String>>,
    /// Per field: topic name to the planted terms placed in that topic.
    field_topics: Vec<BTreeMap<String, Vec<String>>>,
}

fn topic_words(t: &TopicSpec) -> Result<Vec<String>> {
    match (&t.size, &t.words) {
        (Some(n), None) => {
            let width = n.saturating_sub(1).to_string().len().max(3);
            Ok((0..*n).map(|i| format!("{}{i:0width$}", t.name)).collect())
        }
        (None, Some(words)) => Ok(words.clone()),
        _ => Err(Error::Invalid(format!("topic {} needs exactly one of size or words", t.name))),
    }
}

fn plan(spec: &SynthSpec) -> Result<Plan> {
    let fields = spec.fields.iter().map(FieldId::new).collect::<Result<Vec<_>>>()?;
    if fields.len() < 2 {
        return Err(Error::TooFewFields(fields.len()));
    }
    if fields.iter().collect::<BTreeSet<_>>().len() != fields.len() {
        return Err(Error::Invalid("duplicate field in synth spec".into()));
    }
    if spec.docs == 0 || spec.tokens_per_field < spec.docs || spec.segment_len == 0 {
        return Err(Error::Invalid("synth spec needs docs >= 1, tokens_per_field >= docs and segment_len >= 1".into()));
    }
    for (name, rate) in [("filler_rate", spec.filler_rate), ("planted_rate", spec.planted_rate)] {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::Invalid(format!("{name} must be in [0, 1)")));
        }
    }
    if spec.filler_words.is_empty() {
        return Err(Error::Invalid("filler_words must not be empty".into()));
    }
    let field_index =
        |name: &str| spec.fields.iter().position(|f| f == name).ok_or_else(|| Error::UnknownField(name.to_string()));

    // Every word of every vocabulary must be unique across all of them.
    let mut owner: BTreeMap<String, String> = BTreeMap::new();
    let mut claim = |word: &str, source: String| -> Result<()> {
        if tokenize(word, &TokenizerConfig::default()) != [word] {
            return Err(Error::Invalid(format!("{word:?} ({source}) is not a single lowercase token")));
        }
        if let Some(prev) = owner.insert(word.to_string(), source.clone()) {
            return Err(Error::Invalid(format!("{word:?} appears in both {prev} and {source}")));
        }
        Ok(())
    };
    for w in &spec.filler_words {
        claim(w, "filler words".into())?;
    }

    let mut topic_words_map = BTreeMap::new();
    let mut topic_fields: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for t in &spec.topics {
        let words = topic_words(t)?;
        if words.is_empty() || t.fields.is_empty() {
            return Err(Error::Invalid(format!("topic {} needs words and fields", t.name)));
        }
        for w in &words {
            claim(w, format!("topic {}", t.name))?;
        }
        let fs = t.fields.iter().map(|f| field_index(f)).collect::<Result<BTreeSet<_>>>()?;
        if topic_words_map.insert(t.name.clone(), words).is_some() {
            return Err(Error::Invalid(format!("duplicate topic {}", t.name)));
        }
        topic_fields.insert(t.name.clone(), fs);
    }

    let mut field_topics: Vec<BTreeMap<String, Vec<String>>> = vec![BTreeMap::new(); fields.len()];
    for (name, fs) in &topic_fields {
        for &f in fs {
            field_topics[f].insert(name.clone(), Vec::new());
        }
    }
    for (f, topics) in field_topics.iter().enumerate() {
        if topics.is_empty() {
            return Err(Error::Invalid(format!("field {} has no topics", fields[f])));
        }
    }
    let lookup = |topic: &str| topic_fields.get(topic).ok_or_else(|| Error::Invalid(format!("unknown topic {topic}")));
    for s in &spec.stable {
        claim(&s.term, "planted terms".into())?;
        if lookup(&s.topic)?.len() != fields.len() {
            return Err(Error::Invalid(format!("stable term {} needs a topic present in every field", s.term)));
        }
        for topics in &mut field_topics {
            topics.get_mut(&s.topic).unwrap().push(s.term.clone());
        }
    }
    for d in &spec.divergent {
        claim(&d.term, "planted terms".into())?;
        if d.topics.len() != fields.len() {
            return Err(Error::Invalid(format!("divergent term {} needs a topic for every field", d.term)));
        }
        for (field, topic) in &d.topics {
            let f = field_index(field)?;
            if lookup(topic)? != &BTreeSet::from([f]) {
                return Err(Error::Invalid(format!(
                    "divergent term {}: topic {topic} must belong to field {field} alone",
                    d.term
                )));
            }
            field_topics[f].get_mut(topic).unwrap().push(d.term.clone());
        }
    }
    Ok(Plan { fields, topic_words: topic_words_map, field_topics })
}

fn pick<'a, R: Rng>(rng: &mut R, items: &'a [String]) -> &'a str {
    &items[rng.random_range(0..items.len())]
}

/// Generates the corpus for `spec`. Identical inputs give identical output.
pub fn generate(spec: &SynthSpec, seed: u64) -> Result<SynthCorpus> {
    let plan = plan(spec)?;
    let mut planted: Vec<String> =
        spec.stable.iter().map(|s| s.term.clone()).chain(spec.divergent.iter().map(|d| d.term.clone())).collect();
    planted.sort();

    let fields = plan
        .fields
        .iter()
        .enumerate()
        .map(|(f, field)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(f as u64);
            let topics: Vec<(&Vec<String>, &Vec<String>)> =
                plan.field_topics[f].iter().map(|(name, terms)| (&plan.topic_words[name], terms)).collect();
            let docs = (0..spec.docs)
                .map(|d| {
                    let len = spec.tokens_per_field / spec.docs + usize::from(d < spec.tokens_per_field % spec.docs);
                    let mut tokens = Vec::with_capacity(len);
                    while tokens.len() < len {
                        let (words, terms) = topics[rng.random_range(0..topics.len())];
                        for _ in 0..spec.segment_len.min(len - tokens.len()) {
                            let word = if rng.random::<f64>() < spec.filler_rate {
                                pick(&mut rng, &spec.filler_words)
                            } else if !terms.is_empty() && rng.random::<f64>() < spec.planted_rate {
                                pick(&mut rng, terms)
                            } else {
                                pick(&mut rng, words)
                            };
                            tokens.push(word.to_string());
                        }
                    }
                    tokens
                })
                .collect();
            // One title per document: every planted term, rotated, plus a filler word.
            let titles = (0..spec.docs)
                .map(|d| {
                    let mut title: Vec<String> =
                        (0..planted.len()).map(|i| planted[(i + d) % planted.len()].clone()).collect();
                    title.push(pick(&mut rng, &spec.filler_words).to_string());
                    title
                })
                .collect();
            SynthField { field: field.clone(), docs, titles }
        })
        .collect();
    Ok(SynthCorpus {
        fields,
        filler_words: spec.filler_words.clone(),
        stable_terms: spec.stable.iter().map(|s| s.term.clone()).collect(),
        divergent_terms: spec.divergent.iter().map(|d| d.term.clone()).collect(),
    })
}

fn wrap(tokens: &[String]) -> String {
    let mut out = String::new();
    for line in tokens.chunks(20) {
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

impl SynthCorpus {
    /// The in-memory equivalent of writing the tree and ingesting it.
    pub fn to_field_corpora(&self) -> Vec<FieldCorpus> {
        let mut corpora: Vec<FieldCorpus> = self
            .fields
            .iter()
            .map(|f| FieldCorpus {
                field: f.field.clone(),
                body_tokens: f.docs.concat(),
                title_tokens: f.titles.concat(),
            })
            .collect();
        corpora.sort_by(|a, b| a.field.cmp(&b.field));
        corpora
    }

    pub fn stopwords(&self) -> BTreeSet<String> {
        self.filler_words.iter().cloned().collect()
    }

    /// Ground-truth annotations: divergent terms `+1`, stable terms `-1`.
    pub fn truth_tsv(&self) -> String {
        let mut rows: Vec<(&String, i32)> =
            self.divergent_terms.iter().map(|t| (t, 1)).chain(self.stable_terms.iter().map(|t| (t, -1))).collect();
        rows.sort();
        let mut out = String::from("surface\tscore\n");
        for (t, s) in rows {
            writeln!(out, "{t}\t{s}").unwrap();
        }
        out
    }

    /// Writes `<dest>/<field>/papers/docNNNN.txt`, `<dest>/<field>/titles.txt`,
    /// `<dest>/stopwords.txt` and `<dest>/truth.tsv`.
    pub fn write(&self, dest: &Path) -> Result<()> {
        for f in &self.fields {
            let papers = dest.join(f.field.as_str()).join("papers");
            fs::create_dir_all(&papers).map_err(|e| Error::io(&papers, e))?;
            for (i, doc) in f.docs.iter().enumerate() {
                write_atomic(&papers.join(format!("doc{i:04}.txt")), wrap(doc).as_bytes())?;
            }
            let titles: String = f.titles.iter().map(|t| t.join(" ") + "\n").collect();
            write_atomic(&dest.join(f.field.as_str()).join("titles.txt"), titles.as_bytes())?;
        }
        let stop: String = self.filler_words.iter().map(|w| w.clone() + "\n").collect();
        write_atomic(&dest.join("stopwords.txt"), stop.as_bytes())?;
        write_atomic(&dest.join("truth.tsv"), self.truth_tsv().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_corpus, load_stopwords};

    const SPEC: &str = r#"
fields = ["a", "b"]
tokens_per_field = 3001
docs = 4
segment_len = 30

[[topic]]
name = "fruit"
size = 30
fields = ["a"]

[[topic]]
name = "tech"
size = 30
fields = ["b"]

[[topic]]
name = "common"
words = ["data", "method", "result"]
fields = ["a", "b"]

[[stable]]
term = "model"
topic = "common"

[[divergent]]
term = "apple"
topics = { a = "fruit", b = "tech" }
"#;

    fn spec() -> SynthSpec {
        SynthSpec::from_toml(SPEC).unwrap()
    }

    #[test]
    fn token_counts_are_exact() {
        let c = generate(&spec(), 3).unwrap();
        for f in &c.fields {
            let counted: usize = f.docs.iter().map(Vec::len).sum();
            assert_eq!(counted, 3001);
            assert_eq!(f.docs.len(), 4);
        }
    }

    #[test]
    fn divergent_term_stays_in_its_topic() {
        let c = generate(&spec(), 4).unwrap();
        let a = &c.fields[0];
        assert_eq!(a.field.as_str(), "a");
        let all: Vec<&String> = a.docs.iter().flatten().collect();
        assert!(all.iter().any(|t| *t == "apple"));
        assert!(all.iter().all(|t| !t.starts_with("tech")));
        let b: Vec<&String> = c.fields[1].docs.iter().flatten().collect();
        assert!(b.iter().all(|t| !t.starts_with("fruit")));
    }

    #[test]
    fn written_tree_is_deterministic_and_ingestible() {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            generate(&spec(), 9).unwrap().write(d.path()).unwrap();
        }
        let read = |root: &Path, rel: &str| fs::read(root.join(rel)).unwrap();
        for rel in ["a/papers/doc0000.txt", "b/papers/doc0003.txt", "a/titles.txt", "stopwords.txt", "truth.tsv"] {
            assert_eq!(read(dirs[0].path(), rel), read(dirs[1].path(), rel));
        }
        let c = generate(&spec(), 9).unwrap();
        let ingested = ingest_corpus(dirs[0].path(), &TokenizerConfig::default()).unwrap();
        assert_eq!(ingested, c.to_field_corpora());
        assert_eq!(load_stopwords(&dirs[0].path().join("stopwords.txt")).unwrap(), c.stopwords());
        assert_ne!(generate(&spec(), 10).unwrap(), c);
    }

    #[test]
    fn titles_hold_planted_terms_and_one_filler() {
        let c = generate(&spec(), 1).unwrap();
        let stop = c.stopwords();
        for t in &c.fields[0].titles {
            let content: BTreeSet<&str> = t.iter().filter(|w| !stop.contains(*w)).map(String::as_str).collect();
            assert_eq!(content, BTreeSet::from(["apple", "model"]));
            assert_eq!(t.len(), 3);
        }
        assert_eq!(c.truth_tsv(), "surface\tscore\napple\t1\nmodel\t-1\n");
    }

    #[test]
    fn overlapping_vocabularies_rejected() {
        let bad = SPEC.replace(r#"words = ["data", "method", "result"]"#, r#"words = ["data", "fruit003"]"#);
        assert!(generate(&SynthSpec::from_toml(&bad).unwrap(), 1).is_err());
        let bad = SPEC.replace(r#"term = "model""#, r#"term = "the""#);
        assert!(generate(&SynthSpec::from_toml(&bad).unwrap(), 1).is_err());
    }

    #[test]
    fn divergent_topics_must_be_exclusive() {
        let bad = SPEC.replace(r#"topics = { a = "fruit", b = "tech" }"#, r#"topics = { a = "common", b = "tech" }"#);
        assert!(generate(&SynthSpec::from_toml(&bad).unwrap(), 1).is_err());
        let bad = SPEC.replace(r#"topic = "common""#, r#"topic = "fruit""#);
        assert!(generate(&SynthSpec::from_toml(&bad).unwrap(), 1).is_err());
        assert!(SynthSpec::from_toml("fields = [\"a\"]\nbogus = 1").is_err());
    }
}
