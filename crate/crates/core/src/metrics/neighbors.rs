use std::cmp::Ordering;

use super::{dot, Analysis};
use crate::corpus::SlotId;
use crate::error::{Error, Result};

/// The `k` slots most cosine-similar to a query slot.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet {
    pub query: SlotId,
    /// Descending by cosine, ties by slot id ascending.
    pub entries: Vec<(SlotId, f64)>,
}

fn rank_order(a: &(SlotId, f64), b: &(SlotId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

impl Analysis<'_> {
    /// Cosine between two rows, using the cached norms. A zero row scores 0.
    pub(crate) fn slot_cosine(&self, a: SlotId, b: SlotId) -> f64 {
        let (na, nb) = (self.norms[a.index()], self.norms[b.index()]);
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        (dot(self.table.input_row(a), self.table.input_row(b)) / (na * nb)).clamp(-1.0, 1.0)
    }

    /// Top-`k` neighbors over every slot, global and localized, excluding
    /// all variants of the query's surface. `k` is clamped to the number of
    /// eligible slots.
    pub fn top_k_neighbors(&self, query: SlotId, k: usize) -> Result<NeighborSet> {
        if query.index() >= self.table.rows() {
            return Err(Error::OutOfVocabulary(format!("slot {}", query.index())));
        }
        if self.norms[query.index()] == 0.0 {
            return Err(Error::ZeroVector);
        }
        let excluded = self.lexicon.variants(query);
        let mut scored: Vec<(SlotId, f64)> = (0..self.table.rows())
            .filter(|i| !excluded.contains(i))
            .map(|i| {
                let s = SlotId::new(i);
                (s, self.slot_cosine(query, s))
            })
            .collect();
        let k = k.min(scored.len());
        if k == 0 {
            scored.clear();
        } else if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, rank_order);
            scored.truncate(k);
        }
        scored.sort_unstable_by(rank_order);
        Ok(NeighborSet { query, entries: scored })
    }

    /// Top-`k` neighbors of a surface form, localized to `field` when it is a
    /// field term.
    pub fn neighbors_of(&self, surface: &str, field: Option<&str>, k: usize) -> Result<NeighborSet> {
        self.top_k_neighbors(self.lexicon.slot_of(surface, field)?, k)
    }
}
