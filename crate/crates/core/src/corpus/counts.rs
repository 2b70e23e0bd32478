use std::fmt::Write as _;

use super::{FieldCorpus, Lexicon, SlotId};
use crate::error::{Error, Result};

/// A field's body stream mapped to slots, out-of-vocabulary tokens dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedCorpus {
    /// Index into [`Lexicon::fields`].
    pub field: usize,
    pub slots: Vec<SlotId>,
}

pub fn resolve_corpora(corpora: &[FieldCorpus], lexicon: &Lexicon) -> Result<Vec<ResolvedCorpus>> {
    corpora
        .iter()
        .map(|c| {
            let field = lexicon.field_index(c.field.as_str())?;
            let slots = c.body_tokens.iter().filter_map(|t| lexicon.resolve(t, field)).collect();
            Ok(ResolvedCorpus { field, slots })
        })
        .collect()
}

/// Per-field occurrence counts of every slot, after resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotCounts {
    /// `counts[field][slot]`.
    counts: Vec<Vec<u64>>,
    totals: Vec<u64>,
}

impl SlotCounts {
    pub fn from_resolved(resolved: &[ResolvedCorpus], lexicon: &Lexicon) -> Self {
        let mut counts = vec![vec![0u64; lexicon.slot_count()]; lexicon.field_count()];
        for r in resolved {
            for s in &r.slots {
                counts[r.field][s.index()] += 1;
            }
        }
        let totals = counts.iter().map(|c| c.iter().sum()).collect();
        SlotCounts { counts, totals }
    }

    pub fn count(&self, slot: SlotId, field: usize) -> u64 {
        self.counts[field][slot.index()]
    }

    pub fn field_total(&self, field: usize) -> u64 {
        self.totals[field]
    }

    /// Occurrences of each slot summed over fields.
    pub fn overall(&self) -> Vec<u64> {
        let mut all = vec![0u64; self.counts.first().map_or(0, Vec::len)];
        for field in &self.counts {
            for (a, c) in all.iter_mut().zip(field) {
                *a += c;
            }
        }
        all
    }

    /// Relative frequency of `slot` in field `field` (an index).
    pub fn frequency(&self, slot: SlotId, field: usize) -> Result<f64> {
        let total =
            *self.totals.get(field).ok_or_else(|| Error::Invalid(format!("field index {field} out of range")))?;
        if total == 0 {
            return Err(Error::Invalid(format!("field index {field} has no resolved tokens")));
        }
        let count = self.counts[field]
            .get(slot.index())
            .ok_or_else(|| Error::Invalid(format!("slot {} out of range", slot.index())))?;
        Ok(*count as f64 / total as f64)
    }

    /// `f(w)`: occurrences of `slot` in the field's corpus over its resolved
    /// token count.
    pub fn word_frequency(&self, slot: SlotId, field: &str, lexicon: &Lexicon) -> Result<f64> {
        self.frequency(slot, lexicon.field_index(field)?)
    }

    /// `field<TAB>slot_id<TAB>count` for every nonzero count.
    pub fn to_tsv(&self, lexicon: &Lexicon) -> String {
        let mut out = String::from("field\tslot_id\tcount\n");
        for (f, counts) in self.counts.iter().enumerate() {
            for (slot, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
                writeln!(out, "{}\t{slot}\t{c}", lexicon.fields()[f]).unwrap();
            }
        }
        out
    }

    pub fn from_tsv(text: &str, lexicon: &Lexicon) -> Result<Self> {
        const CTX: &str = "frequencies";
        let mut counts = vec![vec![0u64; lexicon.slot_count()]; lexicon.field_count()];
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split('\t').collect();
            let [field, slot, count] = cols[..] else {
                return Err(Error::parse(CTX, format!("bad row {line:?}")));
            };
            let f = lexicon.field_index(field)?;
            let slot: usize = slot.parse().map_err(|_| Error::parse(CTX, format!("bad slot in {line:?}")))?;
            let count: u64 = count.parse().map_err(|_| Error::parse(CTX, format!("bad count in {line:?}")))?;
            *counts[f].get_mut(slot).ok_or_else(|| Error::parse(CTX, format!("slot {slot} out of range")))? = count;
        }
        let totals = counts.iter().map(|c| c.iter().sum()).collect();
        Ok(SlotCounts { counts, totals })
    }
}
