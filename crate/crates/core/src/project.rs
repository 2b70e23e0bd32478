//! Principal-component projection of embeddings, for 2-D plots.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::corpus::Lexicon;
use crate::error::{Error, Result};
use crate::fmt::{g8, parse_f64};
use crate::model::EmbeddingTable;

/// A projected point: surface, scope (field name or `GLOBAL`) and coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoint {
    pub surface: String,
    pub field: String,
    pub coords: Vec<f64>,
}

/// Projects mean-centered `vectors` onto the top `dims` eigenvectors of
/// their covariance, in descending eigenvalue order. Each component is
/// signed so its largest-magnitude loading is positive.
pub fn pca_project(vectors: &[Vec<f64>], dims: usize) -> Result<Vec<Vec<f64>>> {
    let n = vectors.len();
    if n < dims || n == 0 {
        return Err(Error::Invalid(format!("PCA to {dims} dimensions needs at least {dims} vectors, got {n}")));
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Invalid("PCA vectors differ in dimension".into()));
    }
    if dims > d {
        return Err(Error::Invalid(format!("cannot project {d}-dimensional vectors to {dims}")));
    }
    let mut x = DMatrix::from_fn(n, d, |i, j| vectors[i][j]);
    let mean = x.row_mean();
    for mut row in x.row_iter_mut() {
        row -= &mean;
    }
    let cov = (x.transpose() * &x) / (n.saturating_sub(1).max(1) as f64);
    let eigen = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&b)));
    let mut basis = DMatrix::zeros(d, dims);
    for (c, &k) in order.iter().take(dims).enumerate() {
        let mut v = eigen.eigenvectors.column(k).into_owned();
        let lead = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            v = -v;
        }
        basis.set_column(c, &v);
    }
    let projected = x * basis;
    Ok(projected.row_iter().map(|r| r.iter().copied().collect()).collect())
}

/// 2-D projection of every field-term slot's input row.
pub fn project_terms(table: &EmbeddingTable, lexicon: &Lexicon) -> Result<Vec<ProjectedPoint>> {
    let m = lexicon.field_count();
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    for t in 0..lexicon.terms().len() {
        for f in 0..m {
            let slot = lexicon.term_slot(t, f);
            labels.push((lexicon.surface(slot).to_string(), lexicon.scope_name(slot).to_string()));
            vectors.push(table.input_row(slot).to_vec());
        }
    }
    let coords = pca_project(&vectors, 2)?;
    Ok(labels
        .into_iter()
        .zip(coords)
        .map(|((surface, field), coords)| ProjectedPoint { surface, field, coords })
        .collect())
}

pub fn coords_tsv(points: &[ProjectedPoint]) -> String {
    let mut out = String::from("surface\tfield\tx\ty\n");
    for p in points {
        writeln!(out, "{}\t{}\t{}\t{}", p.surface, p.field, g8(p.coords[0]), g8(p.coords[1])).unwrap();
    }
    out
}

pub fn parse_coords_tsv(text: &str) -> Result<Vec<ProjectedPoint>> {
    const CTX: &str = "coordinates";
    let mut lines = text.lines();
    if lines.next() != Some("surface\tfield\tx\ty") {
        return Err(Error::parse(CTX, "bad header"));
    }
    lines
        .map(|line| {
            let cols: Vec<&str> = line.split('\t').collect();
            let [surface, field, x, y] = cols[..] else {
                return Err(Error::parse(CTX, format!("bad row {line:?}")));
            };
            Ok(ProjectedPoint {
                surface: surface.to_string(),
                field: field.to_string(),
                coords: vec![parse_f64(x, CTX)?, parse_f64(y, CTX)?],
            })
        })
        .collect()
}
