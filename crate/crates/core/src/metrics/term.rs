use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::Hash;

use rayon::prelude::*;

use super::{Analysis, Direction, DisMode, NeighborSet};
use crate::corpus::{FieldId, SlotId};
use crate::error::{Error, Result};

/// Per-pair distances of one term and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVariation {
    pub surface: String,
    /// Keyed by field pairs in lexicographic order.
    pub pairwise: BTreeMap<(FieldId, FieldId), f64>,
    pub average: f64,
    pub argmax_pair: (FieldId, FieldId),
}

/// Keeps the first (highest-scoring) occurrence of each identity.
fn dedup_first<K: Eq + Hash + Copy>(set: &[(K, f64)]) -> Vec<(K, f64)> {
    let mut seen = HashSet::with_capacity(set.len());
    set.iter().copied().filter(|(k, _)| seen.insert(*k)).collect()
}

/// Jaccard distance between two neighbor lists keyed by identity.
///
/// Cardinality mode is `(|A ∪ B| - |A ∩ B|) / |A ∪ B|`. Weighted mode
/// replaces each shared identity with `max((cos_a + cos_b) / 2, 0)` and each
/// union identity with `max(cos_a, cos_b, 0)`. Both return 0 for two empty
/// lists.
pub fn set_distance<K: Eq + Hash + Copy>(a: &[(K, f64)], b: &[(K, f64)], mode: DisMode) -> f64 {
    let a = dedup_first(a);
    let b = dedup_first(b);
    let b_scores: HashMap<K, f64> = b.iter().copied().collect();
    match mode {
        DisMode::Cardinality => {
            let shared = a.iter().filter(|(k, _)| b_scores.contains_key(k)).count();
            let union = a.len() + b.len() - shared;
            if union == 0 {
                return 0.0;
            }
            (union - shared) as f64 / union as f64
        }
        DisMode::Weighted => {
            let mut overlap = 0.0;
            let mut union = 0.0;
            let mut a_keys = HashSet::with_capacity(a.len());
            for (k, ca) in &a {
                a_keys.insert(*k);
                match b_scores.get(k) {
                    Some(cb) => {
                        overlap += ((ca + cb) / 2.0).max(0.0);
                        union += ca.max(*cb).max(0.0);
                    }
                    None => union += ca.max(0.0),
                }
            }
            for (k, cb) in &b {
                if !a_keys.contains(k) {
                    union += cb.max(0.0);
                }
            }
            if union <= 0.0 {
                // No positive mass anywhere: fall back to set identity.
                return set_distance(&a, &b, DisMode::Cardinality);
            }
            (1.0 - overlap / union).clamp(0.0, 1.0)
        }
    }
}

/// Overlap identity of a neighbor of a term compared across `fi` and `fj`:
/// that term's slots in either compared field collapse to the surface,
/// everything else keeps its slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Identity {
    Slot(SlotId),
    Term(usize),
}

impl Analysis<'_> {
    fn identities(&self, set: &NeighborSet, fi: usize, fj: usize) -> Vec<(Identity, f64)> {
        set.entries
            .iter()
            .map(|&(slot, cos)| {
                let id = match self.lexicon.term_of(slot) {
                    Some((t, f)) if f == fi || f == fj => Identity::Term(t),
                    _ => Identity::Slot(slot),
                };
                (id, cos)
            })
            .collect()
    }

    fn pair_distance(&self, sets: &[NeighborSet], fi: usize, fj: usize, mode: DisMode) -> f64 {
        set_distance(&self.identities(&sets[fi], fi, fj), &self.identities(&sets[fj], fi, fj), mode)
    }

    fn term_index_checked(&self, surface: &str) -> Result<usize> {
        self.lexicon.term_index(surface).ok_or_else(|| Error::NotATerm(surface.to_string()))
    }

    /// Neighbor sets of every field variant of term `t`, in field order.
    fn term_neighbor_sets(&self, t: usize, k: usize) -> Result<Vec<NeighborSet>> {
        (0..self.lexicon.field_count()).map(|f| self.top_k_neighbors(self.lexicon.term_slot(t, f), k)).collect()
    }

    /// `Dis^k` between a term's embeddings in two fields.
    pub fn term_distance(&self, surface: &str, fi: &str, fj: &str, k: usize, mode: DisMode) -> Result<f64> {
        let t = self.term_index_checked(surface)?;
        let (i, j) = (self.lexicon.field_index(fi)?, self.lexicon.field_index(fj)?);
        if i == j {
            return Err(Error::Invalid(format!("term distance needs two distinct fields, got {fi} twice")));
        }
        let a = self.top_k_neighbors(self.lexicon.term_slot(t, i), k)?;
        let b = self.top_k_neighbors(self.lexicon.term_slot(t, j), k)?;
        Ok(set_distance(&self.identities(&a, i, j), &self.identities(&b, i, j), mode))
    }

    fn variation_from_sets(&self, t: usize, sets: &[NeighborSet], mode: DisMode) -> TermVariation {
        let fields = self.lexicon.fields();
        let distances = (0..fields.len())
            .flat_map(|i| (i + 1..fields.len()).map(move |j| (i, j)))
            .map(|(i, j)| ((i, j), self.pair_distance(sets, i, j, mode)));
        summarize(&self.lexicon.terms()[t], fields, distances)
    }

    /// `Dis^k` over every unordered field pair, their mean and the largest.
    pub fn avg_term_variation(&self, surface: &str, k: usize, mode: DisMode) -> Result<TermVariation> {
        if self.lexicon.field_count() < 2 {
            return Err(Error::TooFewFields(self.lexicon.field_count()));
        }
        let t = self.term_index_checked(surface)?;
        let sets = self.term_neighbor_sets(t, k)?;
        Ok(self.variation_from_sets(t, &sets, mode))
    }

    /// [`avg_term_variation`](Self::avg_term_variation) for every term,
    /// in surface order.
    pub fn all_term_variations(&self, k: usize, mode: DisMode) -> Result<Vec<TermVariation>> {
        if self.lexicon.field_count() < 2 {
            return Err(Error::TooFewFields(self.lexicon.field_count()));
        }
        (0..self.lexicon.terms().len())
            .into_par_iter()
            .map(|t| Ok(self.variation_from_sets(t, &self.term_neighbor_sets(t, k)?, mode)))
            .collect()
    }

    /// Terms ordered by average `Dis^k`, ties by surface, cut at `limit`.
    pub fn rank_terms_by_variation(
        &self,
        k: usize,
        mode: DisMode,
        direction: Direction,
        limit: usize,
    ) -> Result<Vec<TermVariation>> {
        if limit == 0 {
            return Ok(Vec::new());
        }
        let mut all = self.all_term_variations(k, mode)?;
        sort_variations(&mut all, direction);
        all.truncate(limit);
        Ok(all)
    }

    /// `1 - mean cosine` between a term's field embeddings over all pairs.
    pub fn cosine_variation(&self, surface: &str) -> Result<f64> {
        let t = self.term_index_checked(surface)?;
        let m = self.lexicon.field_count();
        if m < 2 {
            return Err(Error::TooFewFields(m));
        }
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for i in 0..m {
            for j in i + 1..m {
                sum += self.slot_cosine(self.lexicon.term_slot(t, i), self.lexicon.term_slot(t, j));
                pairs += 1;
            }
        }
        Ok(1.0 - sum / pairs as f64)
    }
}

/// Builds a [`TermVariation`] from per-pair distances given in lexicographic
/// pair order. The first pair wins ties for the maximum.
pub(crate) fn summarize(
    surface: &str,
    fields: &[FieldId],
    distances: impl Iterator<Item = ((usize, usize), f64)>,
) -> TermVariation {
    let mut pairwise = BTreeMap::new();
    let mut best: Option<((usize, usize), f64)> = None;
    let mut sum = 0.0;
    for ((i, j), d) in distances {
        sum += d;
        if best.is_none_or(|(_, b)| d > b) {
            best = Some(((i, j), d));
        }
        pairwise.insert((fields[i].clone(), fields[j].clone()), d);
    }
    let ((bi, bj), _) = best.expect("at least one field pair");
    TermVariation {
        surface: surface.to_string(),
        average: sum / pairwise.len() as f64,
        pairwise,
        argmax_pair: (fields[bi].clone(), fields[bj].clone()),
    }
}

pub(crate) fn sort_variations(all: &mut [TermVariation], direction: Direction) {
    all.sort_by(|a, b| {
        let by_score = match direction {
            Direction::Most => b.average.total_cmp(&a.average),
            Direction::Least => a.average.total_cmp(&b.average),
        };
        by_score.then_with(|| a.surface.cmp(&b.surface))
    });
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::corpus::Lexicon;
    use crate::model::EmbeddingTable;

    fn ids(keys: &[&'static str]) -> Vec<(&'static str, f64)> {
        keys.iter().map(|k| (*k, 0.5)).collect()
    }

    #[test]
    fn identical_and_disjoint_sets() {
        for mode in [DisMode::Cardinality, DisMode::Weighted] {
            let a = vec![("x", 0.9), ("y", 0.4), ("z", -0.2)];
            assert_eq!(set_distance(&a, &a, mode), 0.0);
            assert_eq!(set_distance(&a, &[("p", 0.9), ("q", 0.1)], mode), 1.0);
            assert_eq!(set_distance::<&str>(&[], &[], mode), 0.0);
        }
    }

    #[test]
    fn hand_enumerated_jaccard() {
        let d = set_distance(&ids(&["a", "b", "c"]), &ids(&["b", "c", "d"]), DisMode::Cardinality);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn weighted_by_hand() {
        // shared b: (0.8+0.4)/2 = 0.6; union: a 0.5 + b 0.8 + c 0.2 = 1.5
        let a = [("a", 0.5), ("b", 0.8)];
        let b = [("b", 0.4), ("c", 0.2)];
        let d = set_distance(&a, &b, DisMode::Weighted);
        assert!((d - (1.0 - 0.6 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn duplicate_identities_count_once() {
        let a = [("x", 0.9), ("x", 0.3), ("y", 0.2)];
        let b = [("x", 0.9), ("y", 0.2)];
        assert_eq!(set_distance(&a, &b, DisMode::Cardinality), 0.0);
        assert_eq!(set_distance(&a, &b, DisMode::Weighted), 0.0);
    }

    /// Three fields, one term, vectors placed so the neighbor sets are known.
    fn three_field_fixture() -> (EmbeddingTable, Lexicon) {
        let fields = ["a", "b", "c"].map(|f| FieldId::new(f).unwrap());
        let mut per_field = BTreeMap::new();
        per_field.insert(fields[0].clone(), vec!["t".to_string()]);
        let lex = Lexicon::new(fields, ["p", "q", "r", "s"].map(String::from), per_field).unwrap();
        // slots: p q r s t@a t@b t@c ; dims: 4 orthogonal axes for p..s
        let rows: Vec<[f64; 4]> = vec![
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.9, 0.0, 0.0], // t@a near p, q
            [0.0, 0.9, 1.0, 0.0], // t@b near r, q
            [0.0, 0.0, 0.9, 1.0], // t@c near s, r
        ];
        let values = rows.concat();
        (EmbeddingTable::from_input(7, 4, values).unwrap(), lex)
    }

    #[test]
    fn three_field_average_by_hand() {
        let (t, lex) = three_field_fixture();
        let a = Analysis::new(&t, &lex).unwrap();
        // k = 2: a -> {p, q}, b -> {r, q}, c -> {s, r}
        let v = a.avg_term_variation("t", 2, DisMode::Cardinality).unwrap();
        let ab = (3.0 - 1.0) / 3.0;
        let ac = 1.0;
        let bc = (3.0 - 1.0) / 3.0;
        let key = |x: &str, y: &str| (FieldId::new(x).unwrap(), FieldId::new(y).unwrap());
        assert_eq!(v.pairwise[&key("a", "b")], ab);
        assert_eq!(v.pairwise[&key("a", "c")], ac);
        assert_eq!(v.pairwise[&key("b", "c")], bc);
        assert!((v.average - (ab + ac + bc) / 3.0).abs() < 1e-15);
        assert_eq!(v.argmax_pair, key("a", "c"));
        let direct = a.term_distance("t", "c", "a", 2, DisMode::Cardinality).unwrap();
        assert_eq!(direct, ac);
    }

    #[test]
    fn constant_pairs_pick_first_pair() {
        let fields = ["a", "b", "c"].map(|f| FieldId::new(f).unwrap());
        let v = summarize("x", &fields, [((0, 1), 0.3), ((0, 2), 0.3), ((1, 2), 0.3)].into_iter());
        assert!((v.average - 0.3).abs() < 1e-15);
        assert_eq!(v.argmax_pair, (fields[0].clone(), fields[1].clone()));
    }

    #[test]
    fn two_fields_average_is_the_pair() {
        let (t, lex) = crate::metrics::neighbors::tests::fixture(5, 20, 3, 4);
        let a = Analysis::new(&t, &lex).unwrap();
        let v = a.avg_term_variation("t01", 6, DisMode::Weighted).unwrap();
        assert_eq!(v.pairwise.len(), 1);
        assert_eq!(v.average, a.term_distance("t01", "a", "b", 6, DisMode::Weighted).unwrap());
    }

    #[test]
    fn non_terms_rejected() {
        let (t, lex) = three_field_fixture();
        let a = Analysis::new(&t, &lex).unwrap();
        assert!(matches!(a.term_distance("p", "a", "b", 2, DisMode::Cardinality), Err(Error::NotATerm(_))));
        assert!(a.term_distance("t", "a", "a", 2, DisMode::Cardinality).is_err());
    }

    #[test]
    fn ranking_is_self_consistent() {
        let (t, lex) = crate::metrics::neighbors::tests::fixture(6, 30, 8, 4);
        let a = Analysis::new(&t, &lex).unwrap();
        assert!(a.rank_terms_by_variation(10, DisMode::Cardinality, Direction::Most, 0).unwrap().is_empty());
        let most = a.rank_terms_by_variation(10, DisMode::Cardinality, Direction::Most, 100).unwrap();
        let mut resorted = most.clone();
        sort_variations(&mut resorted, Direction::Most);
        assert_eq!(most, resorted);
        let least = a.rank_terms_by_variation(10, DisMode::Cardinality, Direction::Least, 3).unwrap();
        assert_eq!(least.len(), 3);
        assert_eq!(least[0].surface, most.last().unwrap().surface);
        let surfaces: BTreeSet<_> = most.iter().map(|v| v.surface.clone()).collect();
        assert_eq!(surfaces.len(), lex.terms().len());
    }

    #[test]
    fn copied_rows_have_zero_distance() {
        let (mut t, lex) = crate::metrics::neighbors::tests::fixture(7, 30, 6, 4);
        for term in 0..lex.terms().len() {
            let row = t.input_row(lex.term_slot(term, 0)).to_vec();
            t.input_row_mut(lex.term_slot(term, 1)).copy_from_slice(&row);
        }
        let a = Analysis::new(&t, &lex).unwrap();
        for mode in [DisMode::Cardinality, DisMode::Weighted] {
            for term in lex.terms() {
                assert_eq!(a.term_distance(term, "a", "b", 9, mode).unwrap(), 0.0);
            }
        }
    }
}
