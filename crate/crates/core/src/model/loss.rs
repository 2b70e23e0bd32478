use crate::corpus::SlotId;
use crate::error::{Error, Result};

use super::EmbeddingTable;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(x)` without overflow for large `|x|`.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Negative-sampling loss and its exact partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct NsGradient {
    pub loss: f64,
    /// d loss / d output row of the center slot.
    pub center_output: Vec<f64>,
    /// d loss / d output row of each negative, in draw order.
    pub negative_outputs: Vec<Vec<f64>>,
    /// d loss / d context vector.
    pub context: Vec<f64>,
}

impl NsGradient {
    /// Gradient landing on each context slot's input row: the context vector
    /// is a mean, so every row receives `1/|context|` of it.
    pub fn input_row_gradient(&self, context_len: usize) -> Vec<f64> {
        let inv = 1.0 / context_len as f64;
        self.context.iter().map(|g| g * inv).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `loss = -ln σ(u_c·h) - Σ ln σ(-u_n·h)` with `h` the context vector and
/// `u` output rows.
pub fn ns_loss_and_grad(
    center: SlotId,
    context_vec: &[f64],
    negatives: &[SlotId],
    table: &EmbeddingTable,
) -> Result<NsGradient> {
    if negatives.contains(&center) {
        return Err(Error::Invalid(format!("negative set contains the center slot {}", center.index())));
    }
    let non_finite =
        || Error::NonFinite { center: center.index(), negatives: negatives.iter().map(|s| s.index()).collect() };

    let h = context_vec;
    let u_c = table.output_row(center);
    let score = dot(u_c, h);
    let mut loss = -log_sigmoid(score);
    // d/dscore of -ln σ(score) is σ(score) - 1.
    let g = sigmoid(score) - 1.0;
    let center_output: Vec<f64> = h.iter().map(|x| g * x).collect();
    let mut context: Vec<f64> = u_c.iter().map(|u| g * u).collect();

    let mut negative_outputs = Vec::with_capacity(negatives.len());
    for &neg in negatives {
        let u_n = table.output_row(neg);
        let score = dot(u_n, h);
        loss -= log_sigmoid(-score);
        let g = sigmoid(score);
        negative_outputs.push(h.iter().map(|x| g * x).collect());
        for (c, u) in context.iter_mut().zip(u_n) {
            *c += g * u;
        }
    }

    if !loss.is_finite() || context.iter().any(|v| !v.is_finite()) {
        return Err(non_finite());
    }
    Ok(NsGradient { loss, center_output, negative_outputs, context })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Loss written straight from the definition, no shared helpers.
    fn naive_loss(u_c: &[f64], negs: &[Vec<f64>], h: &[f64]) -> f64 {
        let d = |a: &[f64]| a.iter().zip(h).map(|(x, y)| x * y).sum::<f64>();
        let mut l = -(1.0 / (1.0 + (-d(u_c)).exp())).ln();
        for n in negs {
            l -= (1.0 / (1.0 + d(n).exp())).ln();
        }
        l
    }

    #[test]
    fn zero_vectors_give_two_ln_two() {
        let table = EmbeddingTable::zeros(2, 4);
        let g = ns_loss_and_grad(SlotId::new(0), &[0.0; 4], &[SlotId::new(1)], &table).unwrap();
        assert!((g.loss - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((g.loss - 1.386294).abs() < 1e-6);
    }

    #[test]
    fn saturated_positive_has_no_loss() {
        let mut table = EmbeddingTable::zeros(1, 2);
        table.output_row_mut(SlotId::new(0)).copy_from_slice(&[400.0, 0.0]);
        let g = ns_loss_and_grad(SlotId::new(0), &[1.0, 0.0], &[], &table).unwrap();
        assert!(g.loss.abs() < 1e-100);
        assert!(log_sigmoid(-800.0).is_finite());
    }

    #[test]
    fn center_in_negatives_rejected() {
        let table = EmbeddingTable::zeros(2, 2);
        assert!(ns_loss_and_grad(SlotId::new(0), &[0.0; 2], &[SlotId::new(0)], &table).is_err());
    }

    #[test]
    fn non_finite_reports_slots() {
        let mut table = EmbeddingTable::zeros(2, 1);
        table.output_row_mut(SlotId::new(1))[0] = f64::NAN;
        let err = ns_loss_and_grad(SlotId::new(0), &[1.0], &[SlotId::new(1)], &table).unwrap_err();
        assert!(matches!(err, Error::NonFinite { center: 0, ref negatives } if negatives == &[1]));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let dim = 10;
        let step = 1e-5;
        for _ in 0..20 {
            let mut table = EmbeddingTable::zeros(6, dim);
            for v in table.matrices_mut().1.iter_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            let h: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let negs: Vec<SlotId> = (1..6).map(SlotId::new).collect();
            let g = ns_loss_and_grad(SlotId::new(0), &h, &negs, &table).unwrap();

            let rows: Vec<Vec<f64>> = (0..6).map(|i| table.output_row(SlotId::new(i)).to_vec()).collect();
            let eval = |rows: &[Vec<f64>], h: &[f64]| naive_loss(&rows[0], &rows[1..], h);
            assert!((eval(&rows, &h) - g.loss).abs() < 1e-12);

            let check = |analytic: f64, numeric: f64| {
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
                assert!(rel < 1e-4, "analytic {analytic} vs numeric {numeric}");
            };
            for d in 0..dim {
                let (mut hp, mut hm) = (h.clone(), h.clone());
                hp[d] += step;
                hm[d] -= step;
                check(g.context[d], (eval(&rows, &hp) - eval(&rows, &hm)) / (2.0 * step));
                for r in 0..6 {
                    let (mut rp, mut rm) = (rows.clone(), rows.clone());
                    rp[r][d] += step;
                    rm[r][d] -= step;
                    let numeric = (eval(&rp, &h) - eval(&rm, &h)) / (2.0 * step);
                    let analytic = if r == 0 { g.center_output[d] } else { g.negative_outputs[r - 1][d] };
                    check(analytic, numeric);
                }
            }
        }
    }
}
