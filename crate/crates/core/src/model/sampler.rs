use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::corpus::SlotId;
use crate::error::{Error, Result};

/// Draws negative slots with probability proportional to `count^power`.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    candidates: Vec<SlotId>,
    weights: Vec<f64>,
    total: f64,
    dist: WeightedIndex<f64>,
    /// Set when exactly one candidate carries mass.
    sole: Option<SlotId>,
}

impl NegativeSampler {
    /// Distribution over every slot; `counts` is indexed by slot.
    pub fn new(counts: &[u64], power: f64) -> Result<Self> {
        Self::restricted(counts, power, |_| true)
    }

    /// Distribution over the slots accepted by `keep`, renormalized.
    pub fn restricted(counts: &[u64], power: f64, keep: impl Fn(SlotId) -> bool) -> Result<Self> {
        let (candidates, weights): (Vec<SlotId>, Vec<f64>) = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (SlotId::new(i), (c as f64).powf(power)))
            .filter(|(s, _)| keep(*s))
            .unzip();
        let dist =
            WeightedIndex::new(&weights).map_err(|e| Error::Invalid(format!("negative sampling distribution: {e}")))?;
        let total = weights.iter().sum();
        let mut positive = candidates.iter().zip(&weights).filter(|(_, &w)| w > 0.0);
        let sole = match (positive.next(), positive.next()) {
            (Some((s, _)), None) => Some(*s),
            _ => None,
        };
        Ok(NegativeSampler { candidates, weights, total, dist, sole })
    }

    /// Analytic probability of drawing `slot` in a single draw.
    pub fn probability(&self, slot: SlotId) -> f64 {
        self.candidates.binary_search(&slot).map_or(0.0, |i| self.weights[i] / self.total)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SlotId {
        self.candidates[self.dist.sample(rng)]
    }

    /// Fills `out` with `n` independent draws, redrawing any that hit
    /// `target`.
    pub fn sample_excluding<R: Rng + ?Sized>(
        &self,
        n: usize,
        target: SlotId,
        rng: &mut R,
        out: &mut Vec<SlotId>,
    ) -> Result<()> {
        out.clear();
        if self.sole == Some(target) {
            return Err(Error::Invalid(format!("slot {} holds all negative-sampling mass", target.index())));
        }
        while out.len() < n {
            let s = self.draw(rng);
            if s != target {
                out.push(s);
            }
        }
        Ok(())
    }
}

/// `n` negatives for `target` from `sampler`.
pub fn negative_sample<R: Rng + ?Sized>(
    sampler: &NegativeSampler,
    n: usize,
    target: SlotId,
    rng: &mut R,
) -> Result<Vec<SlotId>> {
    let mut out = Vec::with_capacity(n);
    sampler.sample_excluding(n, target, rng, &mut out)?;
    Ok(out)
}
