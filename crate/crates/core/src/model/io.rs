//! Embedding exports.
//!
//! Text: a `<rows> <dim>` header, then `surface<TAB>scope<TAB>v1 v2 ... vd`
//! per slot with 8 significant digits. Binary: magic `TSE1`, `u64` rows and
//! dim, then per slot a `u32`-length-prefixed surface, a `u32`-length-prefixed
//! scope and `dim` `f32` values, all little-endian. Only input rows are
//! exported.

use std::fmt::Write as _;

use super::EmbeddingTable;
use crate::corpus::{Lexicon, SlotId};
use crate::error::{Error, Result};
use crate::fmt::{g8, parse_f64};

const MAGIC: &[u8; 4] = b"TSE1";

pub fn write_text(table: &EmbeddingTable, lexicon: &Lexicon) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", table.rows(), table.dim()).unwrap();
    for i in 0..table.rows() {
        let slot = SlotId::new(i);
        write!(out, "{}\t{}\t", lexicon.surface(slot), lexicon.scope_name(slot)).unwrap();
        for (j, v) in table.input_row(slot).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&g8(*v as f32 as f64));
        }
        out.push('\n');
    }
    out
}

fn check_row(lexicon: &Lexicon, i: usize, surface: &str, scope: &str) -> Result<()> {
    let slot = SlotId::new(i);
    if lexicon.surface(slot) != surface || lexicon.scope_name(slot) != scope {
        return Err(Error::parse(
            "embeddings",
            format!(
                "row {i} is {surface}/{scope}, lexicon says {}/{}",
                lexicon.surface(slot),
                lexicon.scope_name(slot)
            ),
        ));
    }
    Ok(())
}

/// Parses a text export and checks it row by row against `lexicon`.
pub fn read_text(text: &str, lexicon: &Lexicon) -> Result<EmbeddingTable> {
    const CTX: &str = "embeddings";
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::parse(CTX, "empty file"))?;
    let (rows, dim) = header
        .split_once(' ')
        .and_then(|(r, d)| Some((r.parse::<usize>().ok()?, d.parse::<usize>().ok()?)))
        .ok_or_else(|| Error::parse(CTX, format!("bad header {header:?}")))?;
    if rows != lexicon.slot_count() {
        return Err(Error::parse(CTX, format!("{rows} rows for {} slots", lexicon.slot_count())));
    }
    let mut values = Vec::with_capacity(rows * dim);
    for i in 0..rows {
        let line = lines.next().ok_or_else(|| Error::parse(CTX, format!("missing row {i}")))?;
        let mut cols = line.splitn(3, '\t');
        let (Some(surface), Some(scope), Some(vector)) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::parse(CTX, format!("bad row {i}")));
        };
        check_row(lexicon, i, surface, scope)?;
        let before = values.len();
        for v in vector.split(' ') {
            values.push(parse_f64(v, CTX)?);
        }
        if values.len() - before != dim {
            return Err(Error::parse(CTX, format!("row {i} has the wrong width")));
        }
    }
    EmbeddingTable::from_input(rows, dim, values)
}

pub fn write_binary(table: &EmbeddingTable, lexicon: &Lexicon) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + table.rows() * (table.dim() * 4 + 24));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(table.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(table.dim() as u64).to_le_bytes());
    for i in 0..table.rows() {
        let slot = SlotId::new(i);
        for s in [lexicon.surface(slot), lexicon.scope_name(slot)] {
            out.extend_from_slice(&(s.len() as u32).to_le_bytes());
            out.extend_from_slice(s.as_bytes());
        }
        for v in table.input_row(slot) {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::parse("embeddings", "truncated binary file"))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<&'a str> {
        let len = self.u32()? as usize;
        std::str::from_utf8(self.take(len)?).map_err(|_| Error::parse("embeddings", "invalid UTF-8"))
    }
}

pub fn read_binary(bytes: &[u8], lexicon: &Lexicon) -> Result<EmbeddingTable> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(Error::parse("embeddings", "not a binary embedding file"));
    }
    let rows = cur.u64()? as usize;
    let dim = cur.u64()? as usize;
    if rows != lexicon.slot_count() {
        return Err(Error::parse("embeddings", format!("{rows} rows for {} slots", lexicon.slot_count())));
    }
    let mut values = Vec::with_capacity(rows * dim);
    for i in 0..rows {
        let surface = cur.string()?;
        let scope = cur.string()?;
        check_row(lexicon, i, surface, scope)?;
        for chunk in cur.take(dim * 4)?.chunks_exact(4) {
            values.push(f32::from_le_bytes(chunk.try_into().unwrap()) as f64);
        }
    }
    if cur.pos != bytes.len() {
        return Err(Error::parse("embeddings", "trailing bytes"));
    }
    EmbeddingTable::from_input(rows, dim, values)
}
