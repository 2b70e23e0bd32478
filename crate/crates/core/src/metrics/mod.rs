//! Term-level and field-level variation measures over a trained table.
//!
//! Everything here is a pure read of an immutable [`EmbeddingTable`], so the
//! batch operations fan out over terms with rayon and reassemble results by
//! key.

mod field;
mod neighbors;
mod report;
mod term;

use std::fmt;
use std::str::FromStr;

use crate::corpus::{Lexicon, SlotCounts};
use crate::error::{Error, Result};
use crate::model::EmbeddingTable;

pub use field::{scale_field_distance, FieldDistanceMatrix};
pub use neighbors::NeighborSet;
pub use report::{neighbors_tsv, parse_neighbors_tsv, parse_term_variation_tsv, term_variation_tsv, NeighborRow};
pub(crate) use term::summarize;
pub use term::{set_distance, TermVariation};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity `u·v / (‖u‖‖v‖)`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// How two neighbor sets are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisMode {
    /// Jaccard distance over set sizes.
    #[default]
    Cardinality,
    /// Jaccard distance with each shared neighbor weighted by its cosine.
    Weighted,
}

impl FromStr for DisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cardinality" => Ok(DisMode::Cardinality),
            "weighted" => Ok(DisMode::Weighted),
            _ => Err(Error::Invalid(format!("unknown distance mode {s:?}"))),
        }
    }
}

impl fmt::Display for DisMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DisMode::Cardinality => "cardinality",
            DisMode::Weighted => "weighted",
        })
    }
}

/// Ranking direction for [`Analysis::rank_terms_by_variation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Most,
    Least,
}

/// A trained table plus its lexicon, with row norms cached.
pub struct Analysis<'a> {
    table: &'a EmbeddingTable,
    lexicon: &'a Lexicon,
    norms: Vec<f64>,
    counts: Option<&'a SlotCounts>,
}

impl<'a> Analysis<'a> {
    pub fn new(table: &'a EmbeddingTable, lexicon: &'a Lexicon) -> Result<Self> {
        if table.rows() != lexicon.slot_count() {
            return Err(Error::Invalid(format!(
                "table has {} rows, lexicon {} slots",
                table.rows(),
                lexicon.slot_count()
            )));
        }
        let norms = (0..table.rows()).map(|i| norm(table.input_row(crate::corpus::SlotId::new(i)))).collect();
        Ok(Analysis { table, lexicon, norms, counts: None })
    }

    /// Attaches per-field slot counts, needed by the field-level measures.
    pub fn with_counts(mut self, counts: &'a SlotCounts) -> Self {
        self.counts = Some(counts);
        self
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    pub fn table(&self) -> &'a EmbeddingTable {
        self.table
    }
}
