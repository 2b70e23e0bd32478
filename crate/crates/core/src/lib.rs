//! Field-localized word embeddings and cross-field term variation.
//!
//! A corpus is partitioned into research fields. Frequent title terms get one
//! embedding per field while every other word keeps a single shared embedding.
//! The trained table is then used to measure how much each term's neighborhood
//! moves between fields and how far apart whole fields are.
//!
//! The crate is organized along the pipeline:
//!
//! * [`corpus`]: tokenization, ingestion and the dual vocabulary ([`Lexicon`]).
//! * [`model`]: the partially-localized CBOW model with negative sampling.
//! * [`metrics`]: neighbor sets, term distances and field distances.
//! * [`eval`]: annotation files, Pearson / nDCG and the separate-CBOW baseline.
//! * [`project`], [`synth`], [`cli`]: figure exports, synthetic corpora and the
//!   command line driver.

pub mod cli;
pub mod corpus;
mod error;
pub mod eval;
pub mod fmt;
pub mod metrics;
pub mod model;
pub mod project;
pub mod synth;

pub use corpus::{FieldCorpus, FieldId, Lexicon, Scope, SlotId, TokenizerConfig};
pub use error::{Error, Result};
pub use metrics::{Analysis, DisMode, FieldDistanceMatrix, NeighborSet, TermVariation};
pub use model::{EmbeddingTable, Hyperparams};
