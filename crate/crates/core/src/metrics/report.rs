//! TSV reports for term variation and neighbor lists.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Analysis, NeighborSet, TermVariation};
use crate::corpus::FieldId;
use crate::error::{Error, Result};
use crate::fmt::{g8, parse_f64};

/// Header `surface avg_dis argmax_pair dis(a,b) ...`, pair columns in
/// lexicographic field order.
pub fn term_variation_tsv(fields: &[FieldId], rows: &[TermVariation]) -> String {
    let mut sorted: Vec<&FieldId> = fields.iter().collect();
    sorted.sort();
    let pairs: Vec<(FieldId, FieldId)> = (0..sorted.len())
        .flat_map(|i| (i + 1..sorted.len()).map(move |j| (i, j)))
        .map(|(i, j)| (sorted[i].clone(), sorted[j].clone()))
        .collect();
    let mut out = String::from("surface\tavg_dis\targmax_pair");
    for (a, b) in &pairs {
        write!(out, "\tdis({a},{b})").unwrap();
    }
    out.push('\n');
    for row in rows {
        let (a, b) = &row.argmax_pair;
        write!(out, "{}\t{}\t{a}-{b}", row.surface, g8(row.average)).unwrap();
        for pair in &pairs {
            let v = row.pairwise.get(pair).copied().unwrap_or(f64::NAN);
            write!(out, "\t{}", g8(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_pair(s: &str, ctx: &str) -> Result<(FieldId, FieldId)> {
    let (a, b) = s.split_once('-').ok_or_else(|| Error::parse(ctx, format!("bad field pair {s:?}")))?;
    Ok((FieldId::new(a)?, FieldId::new(b)?))
}

pub fn parse_term_variation_tsv(text: &str) -> Result<Vec<TermVariation>> {
    const CTX: &str = "term variation report";
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::parse(CTX, "empty file"))?;
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.len() < 4 || cols[..3] != ["surface", "avg_dis", "argmax_pair"] {
        return Err(Error::parse(CTX, format!("bad header {header:?}")));
    }
    let pairs = cols[3..]
        .iter()
        .map(|c| {
            let inner = c
                .strip_prefix("dis(")
                .and_then(|c| c.strip_suffix(')'))
                .ok_or_else(|| Error::parse(CTX, format!("bad column {c:?}")))?;
            let (a, b) = inner.split_once(',').ok_or_else(|| Error::parse(CTX, format!("bad column {c:?}")))?;
            Ok((FieldId::new(a)?, FieldId::new(b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    lines
        .map(|line| {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 + pairs.len() {
                return Err(Error::parse(CTX, format!("bad row {line:?}")));
            }
            let pairwise: BTreeMap<_, _> = pairs
                .iter()
                .cloned()
                .zip(&cols[3..])
                .map(|(p, v)| Ok((p, parse_f64(v, CTX)?)))
                .collect::<Result<_>>()?;
            Ok(TermVariation {
                surface: cols[0].to_string(),
                average: parse_f64(cols[1], CTX)?,
                argmax_pair: parse_pair(cols[2], CTX)?,
                pairwise,
            })
        })
        .collect()
}

/// One line of a neighbor report.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborRow {
    pub rank: usize,
    pub surface: String,
    pub scope: String,
    pub cosine: f64,
}

impl Analysis<'_> {
    pub fn neighbor_rows(&self, set: &NeighborSet) -> Vec<NeighborRow> {
        set.entries
            .iter()
            .enumerate()
            .map(|(i, &(slot, cosine))| NeighborRow {
                rank: i + 1,
                surface: self.lexicon.surface(slot).to_string(),
                scope: self.lexicon.scope_name(slot).to_string(),
                cosine,
            })
            .collect()
    }
}

pub fn neighbors_tsv(rows: &[NeighborRow]) -> String {
    let mut out = String::from("rank\tsurface\tscope\tcosine\n");
    for r in rows {
        writeln!(out, "{}\t{}\t{}\t{}", r.rank, r.surface, r.scope, g8(r.cosine)).unwrap();
    }
    out
}

pub fn parse_neighbors_tsv(text: &str) -> Result<Vec<NeighborRow>> {
    const CTX: &str = "neighbor report";
    let mut lines = text.lines();
    if lines.next() != Some("rank\tsurface\tscope\tcosine") {
        return Err(Error::parse(CTX, "bad header"));
    }
    lines
        .map(|line| {
            let cols: Vec<&str> = line.split('\t').collect();
            let [rank, surface, scope, cosine] = cols[..] else {
                return Err(Error::parse(CTX, format!("bad row {line:?}")));
            };
            Ok(NeighborRow {
                rank: rank.parse().map_err(|_| Error::parse(CTX, format!("bad rank {rank:?}")))?,
                surface: surface.to_string(),
                scope: scope.to_string(),
                cosine: parse_f64(cosine, CTX)?,
            })
        })
        .collect()
}
