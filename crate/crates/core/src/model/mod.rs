//! Partially-localized CBOW with negative sampling.
//!
//! Field terms own one input row per field; global words own a single row.
//! A window in field `f` only ever resolves to global rows or `f`'s term
//! rows, so training one field's corpus leaves every other field's term rows
//! untouched.

mod config;
mod io;
mod loss;
mod sampler;
mod train;

use rand::Rng;

use crate::corpus::{Lexicon, SlotId};
use crate::error::{Error, Result};

pub use config::{parse_key_values, Hyperparams};
pub use io::{read_binary, read_text, write_binary, write_text};
pub use loss::{log_sigmoid, ns_loss_and_grad, sigmoid, NsGradient};
pub use sampler::{negative_sample, NegativeSampler};
pub use train::{train, TrainReport, Trainer};

/// Input and output vectors for every lexical slot, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    rows: usize,
    input: Vec<f64>,
    output: Vec<f64>,
}

impl EmbeddingTable {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingTable { dim, rows, input: vec![0.0; rows * dim], output: vec![0.0; rows * dim] }
    }

    /// Input rows uniform in `[-0.5/d, 0.5/d)`, output rows zero.
    pub fn initialized<R: Rng>(rows: usize, dim: usize, rng: &mut R) -> Self {
        let scale = 1.0 / dim as f64;
        let mut table = EmbeddingTable::zeros(rows, dim);
        for v in &mut table.input {
            *v = (rng.random::<f64>() - 0.5) * scale;
        }
        table
    }

    /// A table rebuilt from exported input rows. Output rows are not part of
    /// the export and come back zeroed.
    pub fn from_input(rows: usize, dim: usize, input: Vec<f64>) -> Result<Self> {
        if input.len() != rows * dim {
            return Err(Error::Invalid(format!("{} values for a {rows}x{dim} table", input.len())));
        }
        Ok(EmbeddingTable { dim, rows, input, output: vec![0.0; rows * dim] })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn input_row(&self, slot: SlotId) -> &[f64] {
        let i = slot.index() * self.dim;
        &self.input[i..i + self.dim]
    }

    pub fn input_row_mut(&mut self, slot: SlotId) -> &mut [f64] {
        let i = slot.index() * self.dim;
        &mut self.input[i..i + self.dim]
    }

    pub fn output_row(&self, slot: SlotId) -> &[f64] {
        let i = slot.index() * self.dim;
        &self.output[i..i + self.dim]
    }

    pub fn output_row_mut(&mut self, slot: SlotId) -> &mut [f64] {
        let i = slot.index() * self.dim;
        &mut self.output[i..i + self.dim]
    }

    pub fn input_matrix(&self) -> &[f64] {
        &self.input
    }

    pub fn output_matrix(&self) -> &[f64] {
        &self.output
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(&self.output).all(|v| v.is_finite())
    }

    pub(crate) fn matrices_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.input, &mut self.output)
    }
}

/// A center slot and the resolved slots around it in one field's stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextWindow {
    pub center: SlotId,
    pub context: Vec<SlotId>,
}

/// Mean of the context's input rows. The divisor is the actual context size,
/// which is smaller than `2s` near the ends of a stream.
pub fn context_vector(window: &ContextWindow, table: &EmbeddingTable) -> Result<Vec<f64>> {
    if window.context.is_empty() {
        return Err(Error::Invalid("empty context window".into()));
    }
    let mut h = vec![0.0; table.dim()];
    for &slot in &window.context {
        for (acc, v) in h.iter_mut().zip(table.input_row(slot)) {
            *acc += v;
        }
    }
    let inv = 1.0 / window.context.len() as f64;
    h.iter_mut().for_each(|v| *v *= inv);
    Ok(h)
}

/// The input row of `surface`, localized to `field` when it is a field term.
pub fn embedding_of<'t>(
    surface: &str,
    field: Option<&str>,
    table: &'t EmbeddingTable,
    lexicon: &Lexicon,
) -> Result<&'t [f64]> {
    Ok(table.input_row(lexicon.slot_of(surface, field)?))
}
