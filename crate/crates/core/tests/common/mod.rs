#![allow(dead_code)]

use std::collections::BTreeMap;

use termshift::corpus::{FieldCorpus, Lexicon};
use termshift::synth::{generate, DivergentSpec, StableSpec, SynthCorpus, SynthSpec, TopicSpec};
use termshift::{Analysis, DisMode, Hyperparams, Result};

fn topic(name: &str, size: usize, fields: &[&str]) -> TopicSpec {
    TopicSpec {
        name: name.to_string(),
        size: Some(size),
        words: None,
        fields: fields.iter().map(|f| f.to_string()).collect(),
    }
}

fn base(tokens_per_field: usize, docs: usize) -> SynthSpec {
    SynthSpec {
        fields: vec!["a".into(), "b".into()],
        tokens_per_field,
        docs,
        segment_len: 50,
        filler_words: ["the", "of", "and", "in", "to"].map(String::from).to_vec(),
        filler_rate: 0.2,
        planted_rate: 0.02,
        topics: Vec::new(),
        stable: Vec::new(),
        divergent: Vec::new(),
    }
}

/// One stable term in shared topics, one divergent term whose topic is
/// exclusive to each field.
pub fn single_pair_spec(tokens_per_field: usize, topic_size: usize) -> SynthSpec {
    let mut spec = base(tokens_per_field, 50);
    spec.topics = vec![
        topic("common", topic_size, &["a", "b"]),
        topic("misc", topic_size, &["a", "b"]),
        topic("fruit", topic_size, &["a"]),
        topic("tech", topic_size, &["b"]),
    ];
    spec.stable = vec![StableSpec { term: "model".into(), topic: "common".into() }];
    spec.divergent = vec![DivergentSpec {
        term: "apple".into(),
        topics: BTreeMap::from([("a".into(), "fruit".into()), ("b".into(), "tech".into())]),
    }];
    spec
}

/// `n` stable and `n` divergent terms spread over `groups` topic groups.
pub fn many_terms_spec(tokens_per_field: usize, n: usize, groups: usize, topic_size: usize) -> SynthSpec {
    let mut spec = base(tokens_per_field, 40);
    for g in 0..groups {
        spec.topics.push(topic(&format!("shared{g}x"), topic_size, &["a", "b"]));
        spec.topics.push(topic(&format!("onlya{g}x"), topic_size, &["a"]));
        spec.topics.push(topic(&format!("onlyb{g}x"), topic_size, &["b"]));
    }
    for i in 0..n {
        let g = i % groups;
        spec.stable.push(StableSpec { term: format!("stable{i:02}"), topic: format!("shared{g}x") });
        spec.divergent.push(DivergentSpec {
            term: format!("diverge{i:02}"),
            topics: BTreeMap::from([("a".into(), format!("onlya{g}x")), ("b".into(), format!("onlyb{g}x"))]),
        });
    }
    spec
}

pub struct Built {
    pub synth: SynthCorpus,
    pub corpora: Vec<FieldCorpus>,
    pub lexicon: Lexicon,
}

/// Generates the corpus and a lexicon whose field terms are exactly the
/// planted terms.
pub fn build(spec: &SynthSpec, seed: u64, min_count: u64) -> Result<Built> {
    let synth = generate(spec, seed)?;
    let corpora = synth.to_field_corpora();
    let planted = spec.stable.len() + spec.divergent.len();
    let lexicon = Lexicon::from_corpora(&corpora, &synth.stopwords(), planted, min_count)?;
    Ok(Built { synth, corpora, lexicon })
}

pub fn small_hyperparams(seed: u64) -> Hyperparams {
    Hyperparams { dim: 32, half_window: 5, negatives: 5, epochs: 3, seed, workers: 1, ..Hyperparams::default() }
}

pub fn avg_dis(analysis: &Analysis, term: &str, k: usize) -> Result<f64> {
    Ok(analysis.avg_term_variation(term, k, DisMode::Cardinality)?.average)
}
