use std::fmt::Write as _;

use rayon::prelude::*;

use super::{Analysis, NeighborSet};
use crate::corpus::{FieldId, SlotCounts};
use crate::error::{Error, Result};
use crate::fmt::{g8, parse_f64};

/// `(exp(1 - t) - 1) / (e - 1)`, clamped into `[0, 1]`.
pub fn scale_field_distance(t: f64) -> f64 {
    let lambda = 1f64.exp() - 1.0;
    ((((1.0 - t).exp()) - 1.0) / lambda).clamp(0.0, 1.0)
}

/// Directed and symmetrized field distances.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDistanceMatrix {
    pub fields: Vec<FieldId>,
    /// `raw[i][j]` sums over terms localized in field `i`. The diagonal is 0.
    pub raw: Vec<Vec<f64>>,
    pub symmetrized: Vec<Vec<f64>>,
}

impl FieldDistanceMatrix {
    pub fn from_raw(fields: Vec<FieldId>, raw: Vec<Vec<f64>>) -> Self {
        let m = fields.len();
        let symmetrized = (0..m).map(|i| (0..m).map(|j| (raw[i][j] + raw[j][i]) / 2.0).collect()).collect();
        FieldDistanceMatrix { fields, raw, symmetrized }
    }

    fn values(&self, directed: bool) -> &[Vec<f64>] {
        if directed {
            &self.raw
        } else {
            &self.symmetrized
        }
    }

    /// CSV with the field names as header row and first column.
    pub fn to_csv(&self, directed: bool) -> String {
        let mut out = String::from("field");
        for f in &self.fields {
            write!(out, ",{f}").unwrap();
        }
        out.push('\n');
        for (f, row) in self.fields.iter().zip(self.values(directed)) {
            out.push_str(f.as_str());
            for v in row {
                write!(out, ",{}", g8(*v)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`to_csv`](Self::to_csv) output back into field names and values.
    pub fn parse_csv(text: &str) -> Result<(Vec<FieldId>, Vec<Vec<f64>>)> {
        const CTX: &str = "field matrix";
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(CTX, "empty file"))?;
        let mut cols = header.split(',');
        if cols.next() != Some("field") {
            return Err(Error::parse(CTX, "header must start with \"field\""));
        }
        let fields = cols.map(FieldId::new).collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(fields.len());
        for (i, line) in lines.enumerate() {
            let mut cols = line.split(',');
            if cols.next() != fields.get(i).map(FieldId::as_str) {
                return Err(Error::parse(CTX, format!("row {i} is out of order")));
            }
            let row = cols.map(|v| parse_f64(v, CTX)).collect::<Result<Vec<_>>>()?;
            if row.len() != fields.len() {
                return Err(Error::parse(CTX, format!("row {i} has {} values", row.len())));
            }
            values.push(row);
        }
        if values.len() != fields.len() {
            return Err(Error::parse(CTX, "matrix is not square"));
        }
        Ok((fields, values))
    }

    /// Self-contained SVG heatmap; darker cells are larger distances.
    pub fn to_svg(&self, directed: bool) -> String {
        const CELL: usize = 60;
        const MARGIN: usize = 120;
        let m = self.fields.len();
        let size = MARGIN + m * CELL + 10;
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        for (i, f) in self.fields.iter().enumerate() {
            let c = MARGIN + i * CELL + CELL / 2;
            writeln!(
                out,
                r#"<text x="{}" y="{c}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
                MARGIN - 6,
                xml_escape(f.as_str())
            )
            .unwrap();
            writeln!(out, r#"<text x="{c}" y="{}" text-anchor="middle">{}</text>"#, MARGIN - 6, xml_escape(f.as_str()))
                .unwrap();
        }
        for (i, row) in self.values(directed).iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let shade = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
                let (x, y) = (MARGIN + j * CELL, MARGIN + i * CELL);
                writeln!(
                    out,
                    r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="rgb({shade},{shade},255)"><title>{}</title></rect>"#,
                    g8(*v)
                )
                .unwrap();
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Analysis<'_> {
    fn require_counts(&self) -> Result<&SlotCounts> {
        self.counts.ok_or_else(|| Error::Invalid("field measures need slot counts".to_string()))
    }

    /// `sim^k` from an already computed neighbor set of `t@fi`.
    fn sim_from_set(&self, set: &NeighborSet, fi: usize, fj: usize) -> Result<f64> {
        let counts = self.require_counts()?;
        let f_query = counts.frequency(set.query, fi)?;
        let mut sum = 0.0;
        let mut size = 0usize;
        for &(slot, cos) in &set.entries {
            if matches!(self.lexicon.term_of(slot), Some((_, f)) if f == fj) {
                sum += f_query * cos.max(0.0) * counts.frequency(slot, fj)?;
                size += 1;
            }
        }
        Ok(if size == 0 { 0.0 } else { sum / size as f64 })
    }

    /// Frequency- and cosine-weighted similarity of `surface@fi` to the
    /// `fj`-localized terms among its `k` nearest neighbors. Negative
    /// cosines count as 0.
    pub fn term_to_field_sim(&self, surface: &str, fi: &str, fj: &str, k: usize) -> Result<f64> {
        let t = self.lexicon.term_index(surface).ok_or_else(|| Error::NotATerm(surface.to_string()))?;
        let (i, j) = (self.lexicon.field_index(fi)?, self.lexicon.field_index(fj)?);
        let set = self.top_k_neighbors(self.lexicon.term_slot(t, i), k)?;
        self.sim_from_set(&set, i, j)
    }

    fn field_sum(&self, sets: &[NeighborSet], fi: usize, fj: usize) -> Result<f64> {
        sets.iter().map(|s| self.sim_from_set(s, fi, fj)).sum()
    }

    fn field_neighbor_sets(&self, fi: usize, k: usize) -> Result<Vec<NeighborSet>> {
        (0..self.lexicon.terms().len())
            .into_par_iter()
            .map(|t| self.top_k_neighbors(self.lexicon.term_slot(t, fi), k))
            .collect()
    }

    /// Directed `FieldDis^k` from `fi` to `fj`.
    pub fn field_distance(&self, fi: &str, fj: &str, k: usize) -> Result<f64> {
        let (i, j) = (self.lexicon.field_index(fi)?, self.lexicon.field_index(fj)?);
        if i == j {
            return Ok(0.0);
        }
        let sets = self.field_neighbor_sets(i, k)?;
        Ok(scale_field_distance(self.field_sum(&sets, i, j)?))
    }

    pub fn field_distance_matrix(&self, k: usize) -> Result<FieldDistanceMatrix> {
        let m = self.lexicon.field_count();
        let mut raw = vec![vec![0.0; m]; m];
        for (i, row) in raw.iter_mut().enumerate() {
            let sets = self.field_neighbor_sets(i, k)?;
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = scale_field_distance(self.field_sum(&sets, i, j)?);
                }
            }
        }
        Ok(FieldDistanceMatrix::from_raw(self.lexicon.fields().to_vec(), raw))
    }
}
