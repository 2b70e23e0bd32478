use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::ops::Range;

use super::vocab::{build_global_vocab, build_term_vocab};
use super::{FieldCorpus, FieldId, GLOBAL_SCOPE};
use crate::error::{Error, Result};

/// Dense index of a lexical slot: one row of the embedding table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotId(u32);

impl SlotId {
    pub fn new(index: usize) -> Self {
        SlotId(u32::try_from(index).expect("slot index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Where a slot lives: the shared space or one field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Global,
    /// Index into [`Lexicon::fields`].
    Field(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entry {
    Global(u32),
    Term(u32),
}

/// The dual vocabulary.
///
/// Slots are laid out canonically: global words sorted lexicographically
/// first, then field terms sorted by `(surface, field)`. Term `t` in field
/// `f` therefore sits at `|V_G| + t * m + f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    fields: Vec<FieldId>,
    global_words: Vec<String>,
    terms: Vec<String>,
    per_field_terms: BTreeMap<FieldId, Vec<String>>,
    index: HashMap<String, Entry>,
}

impl Lexicon {
    /// Assembles a lexicon. Every surface appearing in any per-field list is
    /// localized in all fields.
    pub fn new(
        fields: impl IntoIterator<Item = FieldId>,
        global_words: impl IntoIterator<Item = String>,
        per_field_terms: BTreeMap<FieldId, Vec<String>>,
    ) -> Result<Self> {
        let fields: BTreeSet<FieldId> = fields.into_iter().collect();
        if fields.is_empty() {
            return Err(Error::Invalid("lexicon needs at least one field".into()));
        }
        for f in per_field_terms.keys() {
            if !fields.contains(f) {
                return Err(Error::UnknownField(f.to_string()));
            }
        }
        let global: BTreeSet<String> = global_words.into_iter().collect();
        let terms: BTreeSet<String> = per_field_terms.values().flatten().cloned().collect();
        if let Some(shared) = global.intersection(&terms).next() {
            return Err(Error::Invalid(format!("{shared} is both a global word and a field term")));
        }

        let mut index = HashMap::with_capacity(global.len() + terms.len());
        for (i, w) in global.iter().enumerate() {
            index.insert(w.clone(), Entry::Global(i as u32));
        }
        for (i, t) in terms.iter().enumerate() {
            index.insert(t.clone(), Entry::Term(i as u32));
        }
        Ok(Lexicon {
            fields: fields.into_iter().collect(),
            global_words: global.into_iter().collect(),
            terms: terms.into_iter().collect(),
            per_field_terms,
            index,
        })
    }

    /// Title terms plus a frequency-thresholded global vocabulary.
    pub fn from_corpora(
        corpora: &[FieldCorpus],
        stopwords: &BTreeSet<String>,
        terms_per_field: usize,
        min_count: u64,
    ) -> Result<Self> {
        let terms = build_term_vocab(corpora, stopwords, terms_per_field)?;
        let global = build_global_vocab(corpora, &terms.union, min_count)?;
        Lexicon::new(corpora.iter().map(|c| c.field.clone()), global, terms.per_field)
    }

    pub fn fields(&self) -> &[FieldId] {
        &self.fields
    }

    pub fn field_count(&self) -> usize {
        self.fields.len()
    }

    pub fn field_index(&self, field: &str) -> Result<usize> {
        self.fields.binary_search_by(|f| f.as_str().cmp(field)).map_err(|_| Error::UnknownField(field.to_string()))
    }

    pub fn global_words(&self) -> &[String] {
        &self.global_words
    }

    /// The union of all field term lists, sorted.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn per_field_terms(&self) -> &BTreeMap<FieldId, Vec<String>> {
        &self.per_field_terms
    }

    pub fn slot_count(&self) -> usize {
        self.global_words.len() + self.fields.len() * self.terms.len()
    }

    pub fn is_term(&self, surface: &str) -> bool {
        matches!(self.index.get(surface), Some(Entry::Term(_)))
    }

    pub fn term_index(&self, surface: &str) -> Option<usize> {
        match self.index.get(surface) {
            Some(Entry::Term(t)) => Some(*t as usize),
            _ => None,
        }
    }

    pub fn global_slot(&self, surface: &str) -> Option<SlotId> {
        match self.index.get(surface) {
            Some(Entry::Global(g)) => Some(SlotId(*g)),
            _ => None,
        }
    }

    pub fn term_slot(&self, term: usize, field: usize) -> SlotId {
        debug_assert!(term < self.terms.len() && field < self.fields.len());
        SlotId::new(self.global_words.len() + term * self.fields.len() + field)
    }

    /// Routes a token seen in field `field` (an index) to its slot.
    pub fn resolve(&self, word: &str, field: usize) -> Option<SlotId> {
        match self.index.get(word)? {
            Entry::Global(g) => Some(SlotId(*g)),
            Entry::Term(t) => Some(self.term_slot(*t as usize, field)),
        }
    }

    /// Like [`resolve`](Self::resolve) but takes a field name. `Ok(None)`
    /// marks an out-of-vocabulary token.
    pub fn resolve_token(&self, word: &str, field: &str) -> Result<Option<SlotId>> {
        let field = self.field_index(field)?;
        Ok(self.resolve(word, field))
    }

    /// Slot for a query: global words ignore `field`, terms require it.
    pub fn slot_of(&self, surface: &str, field: Option<&str>) -> Result<SlotId> {
        let field = field.map(|f| self.field_index(f)).transpose()?;
        match self.index.get(surface) {
            Some(Entry::Global(g)) => Ok(SlotId(*g)),
            Some(Entry::Term(t)) => match field {
                Some(f) => Ok(self.term_slot(*t as usize, f)),
                None => Err(Error::FieldRequired(surface.to_string())),
            },
            None => Err(Error::OutOfVocabulary(surface.to_string())),
        }
    }

    /// `(term index, field index)` for a field-term slot.
    pub fn term_of(&self, slot: SlotId) -> Option<(usize, usize)> {
        let i = slot.index().checked_sub(self.global_words.len())?;
        let m = self.fields.len();
        (i < m * self.terms.len()).then(|| (i / m, i % m))
    }

    pub fn scope(&self, slot: SlotId) -> Scope {
        match self.term_of(slot) {
            Some((_, f)) => Scope::Field(f),
            None => Scope::Global,
        }
    }

    pub fn scope_name(&self, slot: SlotId) -> &str {
        match self.scope(slot) {
            Scope::Global => GLOBAL_SCOPE,
            Scope::Field(f) => self.fields[f].as_str(),
        }
    }

    pub fn surface(&self, slot: SlotId) -> &str {
        match self.term_of(slot) {
            Some((t, _)) => &self.terms[t],
            None => &self.global_words[slot.index()],
        }
    }

    /// All slots sharing `slot`'s surface form.
    pub fn variants(&self, slot: SlotId) -> Range<usize> {
        match self.term_of(slot) {
            Some((t, _)) => {
                let start = self.term_slot(t, 0).index();
                start..start + self.fields.len()
            }
            None => slot.index()..slot.index() + 1,
        }
    }

    /// Whether a token at `slot` can appear while reading field `field`.
    pub fn reachable_in(&self, slot: SlotId, field: usize) -> bool {
        match self.scope(slot) {
            Scope::Global => true,
            Scope::Field(f) => f == field,
        }
    }

    /// Lexicon TSV: a `# fields:` line, a header, then
    /// `slot_id<TAB>surface<TAB>scope` in slot order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.fields.iter().map(FieldId::as_str).collect();
        writeln!(out, "# fields: {}", names.join(",")).unwrap();
        out.push_str("slot_id\tsurface\tscope\n");
        for i in 0..self.slot_count() {
            let slot = SlotId::new(i);
            writeln!(out, "{i}\t{}\t{}", self.surface(slot), self.scope_name(slot)).unwrap();
        }
        out
    }

    /// Per-field title term lists as `field<TAB>rank<TAB>surface`.
    pub fn field_terms_tsv(&self) -> String {
        let mut out = String::from("field\trank\tsurface\n");
        for (field, list) in &self.per_field_terms {
            for (rank, term) in list.iter().enumerate() {
                writeln!(out, "{field}\t{}\t{term}", rank + 1).unwrap();
            }
        }
        out
    }

    /// Parses [`to_tsv`](Self::to_tsv) output, optionally with the per-field
    /// lists from [`field_terms_tsv`](Self::field_terms_tsv).
    pub fn from_tsv(lexicon_tsv: &str, field_terms_tsv: Option<&str>) -> Result<Self> {
        const CTX: &str = "lexicon";
        let mut lines = lexicon_tsv.lines();
        let fields_line = lines
            .next()
            .and_then(|l| l.strip_prefix("# fields: "))
            .ok_or_else(|| Error::parse(CTX, "missing '# fields:' line"))?;
        let fields: Vec<FieldId> = fields_line.split(',').map(FieldId::new).collect::<Result<_>>()?;
        if lines.next() != Some("slot_id\tsurface\tscope") {
            return Err(Error::parse(CTX, "missing header row"));
        }

        let mut global = Vec::new();
        let mut term_rows: Vec<(String, String)> = Vec::new();
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split('\t').collect();
            let [id, surface, scope] = cols[..] else {
                return Err(Error::parse(CTX, format!("bad row {line:?}")));
            };
            if id.parse::<usize>().ok() != Some(i) {
                return Err(Error::parse(CTX, format!("slot ids not dense at {line:?}")));
            }
            if scope == GLOBAL_SCOPE {
                if !term_rows.is_empty() {
                    return Err(Error::parse(CTX, "global row after term rows"));
                }
                global.push(surface.to_string());
            } else {
                term_rows.push((surface.to_string(), scope.to_string()));
            }
        }

        let mut per_field: BTreeMap<FieldId, Vec<String>> = BTreeMap::new();
        match field_terms_tsv {
            Some(text) => {
                for line in text.lines().skip(1) {
                    let cols: Vec<&str> = line.split('\t').collect();
                    let [field, _rank, surface] = cols[..] else {
                        return Err(Error::parse("field terms", format!("bad row {line:?}")));
                    };
                    per_field.entry(FieldId::new(field)?).or_default().push(surface.to_string());
                }
            }
            None => {
                // Without the ranked lists every term counts for every field.
                let all: BTreeSet<&String> = term_rows.iter().map(|(s, _)| s).collect();
                for f in &fields {
                    per_field.insert(f.clone(), all.iter().map(|s| s.to_string()).collect());
                }
            }
        }

        let lexicon = Lexicon::new(fields, global, per_field)?;
        if lexicon.slot_count() != lexicon.global_words.len() + term_rows.len() {
            return Err(Error::parse(CTX, "term rows do not match field term lists"));
        }
        for (offset, (surface, scope)) in term_rows.iter().enumerate() {
            let slot = SlotId::new(lexicon.global_words.len() + offset);
            if lexicon.surface(slot) != surface || lexicon.scope_name(slot) != scope {
                return Err(Error::parse(CTX, format!("row {surface}\t{scope} is out of canonical order")));
            }
        }
        Ok(lexicon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(name: &str) -> FieldId {
        FieldId::new(name).unwrap()
    }

    fn lexicon() -> Lexicon {
        let mut per_field = BTreeMap::new();
        per_field.insert(field("nlp"), vec!["alignment".to_string(), "parsing".to_string()]);
        per_field.insert(field("comm"), vec!["alignment".to_string(), "antenna".to_string()]);
        Lexicon::new([field("nlp"), field("comm")], ["the", "signal", "word"].map(String::from), per_field).unwrap()
    }

    #[test]
    fn slot_layout() {
        let lex = lexicon();
        assert_eq!(lex.fields()[0].as_str(), "comm");
        assert_eq!(lex.global_words(), ["signal", "the", "word"]);
        assert_eq!(lex.terms(), ["alignment", "antenna", "parsing"]);
        assert_eq!(lex.slot_count(), 3 + 2 * 3);
        assert_eq!(lex.surface(SlotId::new(3)), "alignment");
        assert_eq!(lex.scope_name(SlotId::new(3)), "comm");
        assert_eq!(lex.scope_name(SlotId::new(4)), "nlp");
        assert_eq!(lex.scope(SlotId::new(0)), Scope::Global);
    }

    #[test]
    fn terms_are_localized() {
        let lex = lexicon();
        let nlp = lex.resolve_token("alignment", "nlp").unwrap().unwrap();
        let comm = lex.resolve_token("alignment", "comm").unwrap().unwrap();
        assert_ne!(nlp, comm);
        assert_eq!(lex.variants(nlp), lex.variants(comm));
        // antenna only came from comm titles, but is localized in nlp too.
        assert!(lex.resolve_token("antenna", "nlp").unwrap().is_some());
    }

    #[test]
    fn global_words_share_a_slot() {
        let lex = lexicon();
        assert_eq!(lex.resolve_token("the", "nlp").unwrap(), lex.resolve_token("the", "comm").unwrap());
        assert_eq!(lex.resolve_token("zebra", "nlp").unwrap(), None);
        assert!(matches!(lex.resolve_token("the", "bio"), Err(Error::UnknownField(_))));
    }

    #[test]
    fn every_slot_is_reachable() {
        let lex = lexicon();
        let mut seen = BTreeSet::new();
        for f in lex.fields() {
            for w in lex.global_words().iter().chain(lex.terms()) {
                seen.insert(lex.resolve_token(w, f.as_str()).unwrap().unwrap());
            }
        }
        assert_eq!(seen.len(), lex.slot_count());
        assert_eq!(seen.last().unwrap().index(), lex.slot_count() - 1);
    }

    #[test]
    fn slot_of_queries() {
        let lex = lexicon();
        assert!(matches!(lex.slot_of("alignment", None), Err(Error::FieldRequired(_))));
        assert!(matches!(lex.slot_of("zebra", None), Err(Error::OutOfVocabulary(_))));
        assert_eq!(lex.slot_of("the", Some("nlp")).unwrap(), lex.slot_of("the", None).unwrap());
    }

    #[test]
    fn overlapping_vocabularies_rejected() {
        let mut per_field = BTreeMap::new();
        per_field.insert(field("a"), vec!["x".to_string()]);
        assert!(Lexicon::new([field("a"), field("b")], ["x".to_string()], per_field).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let lex = lexicon();
        let tsv = lex.to_tsv();
        assert!(tsv.contains("3\talignment\tcomm\n4\talignment\tnlp\n"));
        let back = Lexicon::from_tsv(&tsv, Some(&lex.field_terms_tsv())).unwrap();
        assert_eq!(back, lex);
        let loose = Lexicon::from_tsv(&tsv, None).unwrap();
        assert_eq!(loose.to_tsv(), tsv);
    }

    #[test]
    fn tsv_rejects_shuffled_rows() {
        let tsv = lexicon()
            .to_tsv()
            .replace("3\talignment\tcomm\n4\talignment\tnlp", "3\talignment\tnlp\n4\talignment\tcomm");
        assert!(Lexicon::from_tsv(&tsv, None).is_err());
    }
}
