//! Agreement between model-derived term variation and human annotations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use log::warn;
use rayon::prelude::*;

use crate::corpus::{FieldCorpus, FieldId, Lexicon};
use crate::error::{Error, Result};
use crate::fmt::{g8, parse_f64, read_to_string};
use crate::metrics::{set_distance, summarize, Analysis, DisMode, TermVariation};
use crate::model::{train, EmbeddingTable, Hyperparams};

/// Rows per term required in a raw annotation file, and the divisor.
pub const ANNOTATORS: usize = 5;

/// Annotated variation per term, each in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    pub entries: BTreeMap<String, f64>,
}

/// Parses `surface<TAB>score` lines. If any surface repeats the file is read
/// as raw per-annotator `±1` votes and each term's score is the vote sum
/// over [`ANNOTATORS`]. Surfaces outside `lexicon`'s terms are dropped with a
/// warning.
pub fn parse_annotations(text: &str, lexicon: Option<&Lexicon>) -> Result<AnnotationSet> {
    const CTX: &str = "annotations";
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (surface, score) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(CTX, format!("line {}: expected surface<TAB>score", n + 1)))?;
        if n == 0 && surface == "surface" {
            continue;
        }
        rows.push((surface.to_string(), parse_f64(score.trim(), CTX)?));
    }

    let mut grouped: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (s, v) in rows {
        grouped.entry(s).or_default().push(v);
    }
    let raw = grouped.values().any(|v| v.len() > 1);
    let mut entries = BTreeMap::new();
    for (surface, votes) in grouped {
        let score = if raw {
            if votes.len() < ANNOTATORS {
                return Err(Error::parse(
                    CTX,
                    format!("{surface} has {} annotations, need at least {ANNOTATORS}", votes.len()),
                ));
            }
            if let Some(v) = votes.iter().find(|v| v.abs() != 1.0) {
                return Err(Error::parse(CTX, format!("{surface}: raw vote {v} is not +1 or -1")));
            }
            votes.iter().sum::<f64>() / ANNOTATORS as f64
        } else {
            votes[0]
        };
        if !(-1.0..=1.0).contains(&score) {
            return Err(Error::parse(CTX, format!("{surface}: score {score} outside [-1, 1]")));
        }
        if let Some(lex) = lexicon {
            if !lex.is_term(&surface) {
                warn!("annotated surface {surface} is not a field term; dropped");
                continue;
            }
        }
        entries.insert(surface, score);
    }
    if entries.len() < 2 {
        return Err(Error::parse(CTX, "need at least 2 annotated terms"));
    }
    Ok(AnnotationSet { entries })
}

pub fn load_annotations(path: &Path, lexicon: Option<&Lexicon>) -> Result<AnnotationSet> {
    parse_annotations(&read_to_string(path)?, lexicon)
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Invalid(format!(
            "pearson needs two equal-length sequences of at least 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Relevance is shifted by +1 so `[-1, 1]` annotations become non-negative
/// gains.
pub const RELEVANCE_SHIFT: f64 = 1.0;

fn dcg(gains: impl Iterator<Item = f64>) -> f64 {
    gains.enumerate().map(|(i, g)| g / ((i + 2) as f64).log2()).sum()
}

/// nDCG at `rank` of the ranking by model score (descending, ties by
/// surface) against the annotated relevance.
pub fn ndcg_at(scores: &BTreeMap<String, f64>, relevance: &BTreeMap<String, f64>, rank: usize) -> Result<f64> {
    let mut items = Vec::with_capacity(relevance.len());
    for (surface, rel) in relevance {
        let score = scores.get(surface).ok_or_else(|| Error::Invalid(format!("no model score for {surface}")))?;
        items.push((surface.as_str(), *score, rel + RELEVANCE_SHIFT));
    }
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let actual = dcg(items.iter().take(rank).map(|i| i.2));
    let mut ideal: Vec<f64> = items.iter().map(|i| i.2).collect();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let ideal = dcg(ideal.into_iter().take(rank));
    if ideal <= 0.0 {
        return Err(Error::ZeroIdealDcg);
    }
    Ok((actual / ideal).clamp(0.0, 1.0))
}

/// Scores of one method for every annotated term.
pub type MethodScores = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub method: String,
    pub pearson: f64,
    /// One value per requested rank.
    pub ndcg: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub ranks: Vec<usize>,
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("method\tpearson");
        for r in &self.ranks {
            write!(out, "\tndcg@{r}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{}\t{}", row.method, g8(row.pearson)).unwrap();
            for v in &row.ndcg {
                write!(out, "\t{}", g8(*v)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_tsv(text: &str) -> Result<Self> {
        const CTX: &str = "eval report";
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(CTX, "empty file"))?;
        let cols: Vec<&str> = header.split('\t').collect();
        if cols.len() < 2 || cols[..2] != ["method", "pearson"] {
            return Err(Error::parse(CTX, format!("bad header {header:?}")));
        }
        let ranks = cols[2..]
            .iter()
            .map(|c| {
                c.strip_prefix("ndcg@")
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| Error::parse(CTX, format!("bad column {c:?}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        let rows = lines
            .map(|line| {
                let cols: Vec<&str> = line.split('\t').collect();
                if cols.len() != 2 + ranks.len() {
                    return Err(Error::parse(CTX, format!("bad row {line:?}")));
                }
                Ok(EvalRow {
                    method: cols[0].to_string(),
                    pearson: parse_f64(cols[1], CTX)?,
                    ndcg: cols[2..].iter().map(|v| parse_f64(v, CTX)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(EvalReport { ranks, rows })
    }
}

/// Pearson and nDCG of each method against the annotations, rows in the
/// given method order.
pub fn compare_methods(
    annotations: &AnnotationSet,
    methods: &[(String, MethodScores)],
    ranks: &[usize],
) -> Result<EvalReport> {
    let truth: Vec<f64> = annotations.entries.values().copied().collect();
    let rows = methods
        .iter()
        .map(|(name, scores)| {
            let xs = annotations
                .entries
                .keys()
                .map(|s| {
                    scores.get(s).copied().ok_or_else(|| Error::Invalid(format!("method {name} has no score for {s}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EvalRow {
                method: name.clone(),
                pearson: pearson(&xs, &truth)?,
                ndcg: ranks.iter().map(|&r| ndcg_at(scores, &annotations.entries, r)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EvalReport { ranks: ranks.to_vec(), rows })
}

pub const METHOD_MODEL_JS: &str = "model-js";
pub const METHOD_MODEL_COSINE: &str = "model-cosine";
pub const METHOD_SEPARATE_JS: &str = "separate-cbow-js";

/// Average `Dis^k` and `1 - mean cosine` of the main model for each surface.
pub fn model_scores(
    analysis: &Analysis,
    surfaces: &[String],
    k: usize,
    mode: DisMode,
) -> Result<(MethodScores, MethodScores)> {
    let js = surfaces
        .par_iter()
        .map(|s| Ok((s.clone(), analysis.avg_term_variation(s, k, mode)?.average)))
        .collect::<Result<_>>()?;
    let cosine = surfaces.iter().map(|s| Ok((s.clone(), analysis.cosine_variation(s)?))).collect::<Result<_>>()?;
    Ok((js, cosine))
}

/// A vanilla CBOW space trained on one field alone. Every word is global.
pub struct SeparateModel {
    pub field: FieldId,
    pub lexicon: Lexicon,
    pub table: EmbeddingTable,
}

impl SeparateModel {
    /// Top-`k` neighbor surfaces of `surface` in this space, or `None` if the
    /// surface has no slot or a zero vector here.
    fn neighbors(&self, surface: &str, k: usize) -> Result<Option<Vec<(&str, f64)>>> {
        let Some(slot) = self.lexicon.global_slot(surface) else {
            return Ok(None);
        };
        let analysis = Analysis::new(&self.table, &self.lexicon)?;
        match analysis.top_k_neighbors(slot, k) {
            Ok(set) => Ok(Some(set.entries.iter().map(|&(s, c)| (self.lexicon.surface(s), c)).collect())),
            Err(Error::ZeroVector) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Trains one independent space per field. A field's vocabulary is its body
/// tokens seen at least `min_count` times there, plus every field term that
/// occurs in it at all.
pub fn train_separate_baseline(
    corpora: &[FieldCorpus],
    terms: &BTreeSet<String>,
    min_count: u64,
    hp: &Hyperparams,
) -> Result<Vec<SeparateModel>> {
    corpora
        .iter()
        .map(|corpus| {
            let mut counts: HashMap<&str, u64> = HashMap::new();
            for t in &corpus.body_tokens {
                *counts.entry(t.as_str()).or_default() += 1;
            }
            let words: BTreeSet<String> = counts
                .into_iter()
                .filter(|&(w, c)| c >= min_count || terms.contains(w))
                .map(|(w, _)| w.to_string())
                .collect();
            if words.is_empty() {
                return Err(Error::EmptyGlobalVocab);
            }
            let lexicon = Lexicon::new([corpus.field.clone()], words, BTreeMap::new())?;
            let table = train(std::slice::from_ref(corpus), &lexicon, hp)?;
            Ok(SeparateModel { field: corpus.field.clone(), lexicon, table })
        })
        .collect()
}

/// Cross-space `Dis^k` of a surface between separately trained fields, with
/// neighbors compared by surface. A surface missing from either space scores
/// 1 for that pair.
pub fn baseline_variation(models: &[SeparateModel], surface: &str, k: usize, mode: DisMode) -> Result<TermVariation> {
    if models.len() < 2 {
        return Err(Error::TooFewFields(models.len()));
    }
    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&a, &b| models[a].field.cmp(&models[b].field));
    let fields: Vec<FieldId> = order.iter().map(|&i| models[i].field.clone()).collect();
    let sets = order.iter().map(|&i| models[i].neighbors(surface, k)).collect::<Result<Vec<_>>>()?;
    let mut distances = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let d = match (&sets[i], &sets[j]) {
                (Some(a), Some(b)) => set_distance(a, b, mode),
                _ => 1.0,
            };
            distances.push(((i, j), d));
        }
    }
    Ok(summarize(surface, &fields, distances.into_iter()))
}

pub fn baseline_scores(models: &[SeparateModel], surfaces: &[String], k: usize, mode: DisMode) -> Result<MethodScores> {
    surfaces.par_iter().map(|s| Ok((s.clone(), baseline_variation(models, s, k, mode)?.average))).collect()
}
