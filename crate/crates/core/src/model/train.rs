use std::borrow::Cow;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::loss::{log_sigmoid, sigmoid};
use super::{EmbeddingTable, Hyperparams, NegativeSampler};
use crate::corpus::{resolve_corpora, FieldCorpus, Lexicon, ResolvedCorpus, SlotCounts, SlotId};
use crate::error::{Error, Result};

/// Center positions handed out per scheduling step. Fields are interleaved
/// block by block so no field dominates the end of an epoch.
const BLOCK: usize = 4096;

const INIT_STREAM: u64 = 0;
const TRAIN_STREAM: u64 = 1;

/// Per-epoch training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean negative-sampling loss per window, one entry per epoch.
    pub epoch_losses: Vec<f64>,
    pub windows: u64,
}

/// Row access used by the SGD step, so the same step runs on a plain table
/// and on the shared lock-free view.
trait ParamStore {
    fn add_input(&self, slot: usize, acc: &mut [f64]);
    fn output_dot(&self, slot: usize, h: &[f64]) -> f64;
    /// `grad_h += g * u; u -= lr * g * h` for output row `u`.
    fn output_step(&mut self, slot: usize, g: f64, lr: f64, h: &[f64], grad_h: &mut [f64]);
    /// `x -= scale * delta` for input row `x`.
    fn input_step(&mut self, slot: usize, scale: f64, delta: &[f64]);
}

struct Exclusive<'a> {
    dim: usize,
    input: &'a mut [f64],
    output: &'a mut [f64],
}

impl ParamStore for Exclusive<'_> {
    fn add_input(&self, slot: usize, acc: &mut [f64]) {
        let row = &self.input[slot * self.dim..(slot + 1) * self.dim];
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }

    fn output_dot(&self, slot: usize, h: &[f64]) -> f64 {
        let row = &self.output[slot * self.dim..(slot + 1) * self.dim];
        row.iter().zip(h).map(|(u, x)| u * x).sum()
    }

    fn output_step(&mut self, slot: usize, g: f64, lr: f64, h: &[f64], grad_h: &mut [f64]) {
        let row = &mut self.output[slot * self.dim..(slot + 1) * self.dim];
        for ((u, x), gh) in row.iter_mut().zip(h).zip(grad_h.iter_mut()) {
            *gh += g * *u;
            *u -= lr * g * x;
        }
    }

    fn input_step(&mut self, slot: usize, scale: f64, delta: &[f64]) {
        let row = &mut self.input[slot * self.dim..(slot + 1) * self.dim];
        for (x, d) in row.iter_mut().zip(delta) {
            *x -= scale * d;
        }
    }
}

/// Table view shared by all workers in throughput mode. Updates race and
/// may be lost; each element is read and written atomically.
struct Shared<'a> {
    dim: usize,
    input: &'a [AtomicU64],
    output: &'a [AtomicU64],
}

fn load(a: &AtomicU64) -> f64 {
    f64::from_bits(a.load(Ordering::Relaxed))
}

fn store(a: &AtomicU64, v: f64) {
    a.store(v.to_bits(), Ordering::Relaxed)
}

impl ParamStore for Shared<'_> {
    fn add_input(&self, slot: usize, acc: &mut [f64]) {
        let row = &self.input[slot * self.dim..(slot + 1) * self.dim];
        for (a, v) in acc.iter_mut().zip(row) {
            *a += load(v);
        }
    }

    fn output_dot(&self, slot: usize, h: &[f64]) -> f64 {
        let row = &self.output[slot * self.dim..(slot + 1) * self.dim];
        row.iter().zip(h).map(|(u, x)| load(u) * x).sum()
    }

    fn output_step(&mut self, slot: usize, g: f64, lr: f64, h: &[f64], grad_h: &mut [f64]) {
        let row = &self.output[slot * self.dim..(slot + 1) * self.dim];
        for ((u, x), gh) in row.iter().zip(h).zip(grad_h.iter_mut()) {
            let old = load(u);
            *gh += g * old;
            store(u, old - lr * g * x);
        }
    }

    fn input_step(&mut self, slot: usize, scale: f64, delta: &[f64]) {
        let row = &self.input[slot * self.dim..(slot + 1) * self.dim];
        for (x, d) in row.iter().zip(delta) {
            store(x, load(x) - scale * d);
        }
    }
}

/// Scratch buffers for one worker.
struct Scratch {
    context: Vec<SlotId>,
    negatives: Vec<SlotId>,
    h: Vec<f64>,
    grad_h: Vec<f64>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Scratch { context: Vec::new(), negatives: Vec::new(), h: vec![0.0; dim], grad_h: vec![0.0; dim] }
    }
}

/// One fused SGD step on a window. Returns the window's loss.
fn sgd_window<P: ParamStore>(store: &mut P, center: SlotId, lr: f64, scratch: &mut Scratch) -> Result<f64> {
    let Scratch { context, negatives, h, grad_h } = scratch;
    h.fill(0.0);
    for c in context.iter() {
        store.add_input(c.index(), h);
    }
    let inv = 1.0 / context.len() as f64;
    h.iter_mut().for_each(|v| *v *= inv);
    grad_h.fill(0.0);

    let score = store.output_dot(center.index(), h);
    let mut loss = -log_sigmoid(score);
    store.output_step(center.index(), sigmoid(score) - 1.0, lr, h, grad_h);
    for n in negatives.iter() {
        let score = store.output_dot(n.index(), h);
        loss -= log_sigmoid(-score);
        store.output_step(n.index(), sigmoid(score), lr, h, grad_h);
    }
    if !loss.is_finite() || grad_h.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite {
            center: center.index(),
            negatives: negatives.iter().map(|s| s.index()).collect(),
        });
    }
    for c in context.iter() {
        store.input_step(c.index(), lr * inv, grad_h);
    }
    Ok(loss)
}

/// Prepared training state: resolved streams, counts and per-field
/// negative samplers.
pub struct Trainer<'a> {
    lexicon: &'a Lexicon,
    hp: Hyperparams,
    resolved: Vec<ResolvedCorpus>,
    counts: SlotCounts,
    samplers: Vec<NegativeSampler>,
    windows_per_epoch: u64,
}

impl<'a> Trainer<'a> {
    pub fn new(corpora: &[FieldCorpus], lexicon: &'a Lexicon, hp: &Hyperparams) -> Result<Self> {
        hp.validate()?;
        let resolved = resolve_corpora(corpora, lexicon)?;
        let windows_per_epoch: u64 = resolved.iter().filter(|r| r.slots.len() >= 2).map(|r| r.slots.len() as u64).sum();
        if windows_per_epoch == 0 {
            return Err(Error::EmptyEffectiveCorpus);
        }
        let counts = SlotCounts::from_resolved(&resolved, lexicon);
        let overall = counts.overall();
        // Negatives for field f come from the slots a token of f can resolve
        // to, so foreign field rows never move.
        let samplers = resolved
            .iter()
            .map(|r| NegativeSampler::restricted(&overall, hp.unigram_power, |s| lexicon.reachable_in(s, r.field)))
            .collect::<Result<_>>()?;
        Ok(Trainer { lexicon, hp: hp.clone(), resolved, counts, samplers, windows_per_epoch })
    }

    pub fn counts(&self) -> &SlotCounts {
        &self.counts
    }

    pub fn resolved(&self) -> &[ResolvedCorpus] {
        &self.resolved
    }

    pub fn initial_table(&self) -> EmbeddingTable {
        let mut rng = ChaCha8Rng::seed_from_u64(self.hp.seed);
        rng.set_stream(INIT_STREAM);
        EmbeddingTable::initialized(self.lexicon.slot_count(), self.hp.dim, &mut rng)
    }

    pub fn train(&self) -> Result<(EmbeddingTable, TrainReport)> {
        let mut table = self.initial_table();
        let report = self.train_table(&mut table)?;
        Ok((table, report))
    }

    /// Runs all epochs on `table` in place.
    pub fn train_table(&self, table: &mut EmbeddingTable) -> Result<TrainReport> {
        if table.rows() != self.lexicon.slot_count() || table.dim() != self.hp.dim {
            return Err(Error::Invalid("table shape does not match lexicon".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.hp.seed);
        rng.set_stream(TRAIN_STREAM);
        let total = self.hp.epochs as u64 * self.windows_per_epoch;
        let mut report = TrainReport { epoch_losses: Vec::with_capacity(self.hp.epochs), windows: 0 };

        let mut shared = (self.hp.workers > 1).then(|| SharedTable::from_table(table));
        for _ in 0..self.hp.epochs {
            let streams = self.epoch_streams(&mut rng);
            let blocks = schedule(&streams);
            let rate = LearningRate {
                start: self.hp.learning_rate_start,
                end: self.hp.learning_rate_end,
                done_before: report.windows,
                total,
            };
            let (loss, windows) = match &mut shared {
                None => {
                    let (input, output) = table.matrices_mut();
                    let mut store = Exclusive { dim: self.hp.dim, input, output };
                    self.run_blocks(&mut store, &streams, &blocks, &rate, &mut rng)?
                }
                Some(shared) => self.run_hogwild(shared, &streams, &blocks, &rate, &mut rng)?,
            };
            report.windows += windows;
            report.epoch_losses.push(if windows > 0 { loss / windows as f64 } else { 0.0 });
        }
        if let Some(shared) = shared {
            shared.write_back(table);
        }
        if !table.is_finite() {
            return Err(Error::NonFinite { center: 0, negatives: Vec::new() });
        }
        Ok(report)
    }

    /// One pass over a single field's stream at a constant learning rate.
    /// `corpus` indexes the corpora passed to [`Trainer::new`]. Returns the
    /// mean window loss.
    pub fn field_pass(&self, corpus: usize, table: &mut EmbeddingTable, lr: f64, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let streams: Vec<Cow<[SlotId]>> = self
            .resolved
            .iter()
            .enumerate()
            .map(|(i, r)| if i == corpus { Cow::Borrowed(r.slots.as_slice()) } else { Cow::Owned(Vec::new()) })
            .collect();
        let blocks = schedule(&streams);
        let (input, output) = table.matrices_mut();
        let mut store = Exclusive { dim: self.hp.dim, input, output };
        let rate = LearningRate { start: lr, end: lr, done_before: 0, total: 1 };
        let (loss, windows) = self.run_blocks(&mut store, &streams, &blocks, &rate, &mut rng)?;
        Ok(if windows > 0 { loss / windows as f64 } else { 0.0 })
    }

    /// The streams for one epoch, subsampled when enabled.
    fn epoch_streams<R: Rng>(&self, rng: &mut R) -> Vec<Cow<'_, [SlotId]>> {
        if self.hp.subsample <= 0.0 {
            return self.resolved.iter().map(|r| Cow::Borrowed(r.slots.as_slice())).collect();
        }
        let overall = self.counts.overall();
        let total: u64 = overall.iter().sum();
        let t = self.hp.subsample;
        self.resolved
            .iter()
            .map(|r| {
                let kept = r
                    .slots
                    .iter()
                    .copied()
                    .filter(|s| {
                        let f = overall[s.index()] as f64 / total as f64;
                        let keep = ((f / t).sqrt() + 1.0) * t / f;
                        keep >= 1.0 || rng.random::<f64>() < keep
                    })
                    .collect();
                Cow::Owned(kept)
            })
            .collect()
    }

    fn fill_window(&self, stream: &[SlotId], pos: usize, context: &mut Vec<SlotId>) {
        let s = self.hp.half_window;
        let lo = pos.saturating_sub(s);
        let hi = (pos + s + 1).min(stream.len());
        context.clear();
        context.extend_from_slice(&stream[lo..pos]);
        context.extend_from_slice(&stream[pos + 1..hi]);
    }

    fn run_blocks<P: ParamStore, R: Rng>(
        &self,
        store: &mut P,
        streams: &[Cow<[SlotId]>],
        blocks: &[Block],
        rate: &LearningRate,
        rng: &mut R,
    ) -> Result<(f64, u64)> {
        let mut scratch = Scratch::new(self.hp.dim);
        let mut loss = 0.0;
        let mut windows = 0u64;
        for block in blocks {
            let stream = &streams[block.corpus];
            for pos in block.start..block.end {
                self.fill_window(stream, pos, &mut scratch.context);
                if scratch.context.is_empty() {
                    continue;
                }
                let center = stream[pos];
                self.samplers[block.corpus].sample_excluding(self.hp.negatives, center, rng, &mut scratch.negatives)?;
                let lr = rate.at(rate.done_before + windows);
                loss += sgd_window(store, center, lr, &mut scratch)?;
                windows += 1;
            }
        }
        Ok((loss, windows))
    }

    fn run_hogwild<R: Rng>(
        &self,
        shared: &SharedTable,
        streams: &[Cow<[SlotId]>],
        blocks: &[Block],
        rate: &LearningRate,
        rng: &mut R,
    ) -> Result<(f64, u64)> {
        let next = AtomicUsize::new(0);
        let progress = AtomicU64::new(rate.done_before);
        let seeds: Vec<u64> = (0..self.hp.workers).map(|_| rng.random()).collect();
        let results: Vec<Result<(f64, u64)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .iter()
                .map(|&seed| {
                    let (next, progress) = (&next, &progress);
                    scope.spawn(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let mut store = Shared { dim: self.hp.dim, input: &shared.input, output: &shared.output };
                        let mut scratch = Scratch::new(self.hp.dim);
                        let (mut loss, mut windows) = (0.0, 0u64);
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(block) = blocks.get(i) else { break };
                            let stream = &streams[block.corpus];
                            for pos in block.start..block.end {
                                self.fill_window(stream, pos, &mut scratch.context);
                                if scratch.context.is_empty() {
                                    continue;
                                }
                                let center = stream[pos];
                                self.samplers[block.corpus].sample_excluding(
                                    self.hp.negatives,
                                    center,
                                    &mut rng,
                                    &mut scratch.negatives,
                                )?;
                                let done = progress.fetch_add(1, Ordering::Relaxed);
                                let lr = rate.at(done);
                                loss += sgd_window(&mut store, center, lr, &mut scratch)?;
                                windows += 1;
                            }
                        }
                        Ok((loss, windows))
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
        });
        let mut total_loss = 0.0;
        let mut total_windows = 0;
        for r in results {
            let (l, w) = r?;
            total_loss += l;
            total_windows += w;
        }
        Ok((total_loss, total_windows))
    }
}

struct SharedTable {
    input: Vec<AtomicU64>,
    output: Vec<AtomicU64>,
}

impl SharedTable {
    fn from_table(table: &EmbeddingTable) -> Self {
        let convert = |m: &[f64]| m.iter().map(|v| AtomicU64::new(v.to_bits())).collect();
        SharedTable { input: convert(table.input_matrix()), output: convert(table.output_matrix()) }
    }

    fn write_back(self, table: &mut EmbeddingTable) {
        let (input, output) = table.matrices_mut();
        for (dst, src) in input.iter_mut().zip(self.input) {
            *dst = f64::from_bits(src.into_inner());
        }
        for (dst, src) in output.iter_mut().zip(self.output) {
            *dst = f64::from_bits(src.into_inner());
        }
    }
}

/// Linear decay from `start` to `end` over `total` windows.
struct LearningRate {
    start: f64,
    end: f64,
    done_before: u64,
    total: u64,
}

impl LearningRate {
    fn at(&self, done: u64) -> f64 {
        let progress = (done as f64 / self.total.max(1) as f64).min(1.0);
        self.start - (self.start - self.end) * progress
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Block {
    corpus: usize,
    start: usize,
    end: usize,
}

/// Round-robin over fields, `BLOCK` center positions at a time.
fn schedule(streams: &[Cow<[SlotId]>]) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut offsets = vec![0usize; streams.len()];
    loop {
        let mut progressed = false;
        for (corpus, stream) in streams.iter().enumerate() {
            if stream.len() < 2 || offsets[corpus] >= stream.len() {
                continue;
            }
            let start = offsets[corpus];
            let end = (start + BLOCK).min(stream.len());
            blocks.push(Block { corpus, start, end });
            offsets[corpus] = end;
            progressed = true;
        }
        if !progressed {
            return blocks;
        }
    }
}

/// Trains a fresh table over all field corpora.
pub fn train(corpora: &[FieldCorpus], lexicon: &Lexicon, hp: &Hyperparams) -> Result<EmbeddingTable> {
    Ok(Trainer::new(corpora, lexicon, hp)?.train()?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{FieldId, Scope};
    use crate::model::{context_vector, ns_loss_and_grad, ContextWindow};

    fn toy() -> (Vec<FieldCorpus>, Lexicon) {
        // Two fields; "bank" is a field term used with water words in one
        // field and money words in the other.
        let a = "river bank water flow river bank shore water ".repeat(200);
        let b = "money bank loan cash money bank credit loan ".repeat(200);
        let corpora: Vec<FieldCorpus> = [("a", a), ("b", b)]
            .into_iter()
            .map(|(f, body)| FieldCorpus {
                field: FieldId::new(f).unwrap(),
                body_tokens: body.split_whitespace().map(String::from).collect(),
                title_tokens: vec!["bank".into()],
            })
            .collect();
        let lex = Lexicon::from_corpora(&corpora, &Default::default(), 1, 1).unwrap();
        (corpora, lex)
    }

    fn small_hp() -> Hyperparams {
        Hyperparams { dim: 8, half_window: 2, epochs: 2, learning_rate_start: 0.05, ..Hyperparams::default() }
    }

    #[test]
    fn schedule_interleaves_and_covers() {
        let a: Vec<SlotId> = vec![SlotId::new(0); BLOCK * 2 + 5];
        let b: Vec<SlotId> = vec![SlotId::new(1); 10];
        let streams = vec![Cow::Owned(a), Cow::Owned(vec![SlotId::new(0)]), Cow::Owned(b)];
        let blocks = schedule(&streams);
        assert_eq!(blocks.iter().map(|b| b.corpus).collect::<Vec<_>>(), vec![0, 2, 0, 0]);
        assert_eq!(blocks.iter().filter(|b| b.corpus == 0).map(|b| b.end - b.start).sum::<usize>(), BLOCK * 2 + 5);
    }

    #[test]
    fn windows_truncate_at_edges() {
        let (corpora, lex) = toy();
        let trainer = Trainer::new(&corpora, &lex, &small_hp()).unwrap();
        let stream: Vec<SlotId> = (0..6).map(SlotId::new).collect();
        let mut ctx = Vec::new();
        trainer.fill_window(&stream, 0, &mut ctx);
        assert_eq!(ctx, vec![SlotId::new(1), SlotId::new(2)]);
        trainer.fill_window(&stream, 3, &mut ctx);
        assert_eq!(ctx, [1, 2, 4, 5].map(SlotId::new).to_vec());
    }

    #[test]
    fn loss_decreases() {
        let (corpora, lex) = toy();
        let (_, report) = Trainer::new(&corpora, &lex, &small_hp()).unwrap().train().unwrap();
        assert_eq!(report.epoch_losses.len(), 2);
        assert!(report.epoch_losses[1] < report.epoch_losses[0], "{report:?}");
    }

    #[test]
    fn deterministic_with_one_worker() {
        let (corpora, lex) = toy();
        let a = train(&corpora, &lex, &small_hp()).unwrap();
        let b = train(&corpora, &lex, &small_hp()).unwrap();
        assert_eq!(a.input_matrix(), b.input_matrix());
        assert_eq!(a.output_matrix(), b.output_matrix());
        let c = train(&corpora, &lex, &Hyperparams { seed: 2, ..small_hp() }).unwrap();
        assert_ne!(a.input_matrix(), c.input_matrix());
    }

    #[test]
    fn hogwild_trains_finite_tables() {
        let (corpora, lex) = toy();
        let hp = Hyperparams { workers: 4, ..small_hp() };
        let (table, report) = Trainer::new(&corpora, &lex, &hp).unwrap().train().unwrap();
        assert!(table.is_finite());
        assert!(report.epoch_losses[1] < report.epoch_losses[0]);
    }

    #[test]
    fn all_oov_corpus_rejected() {
        let (mut corpora, lex) = toy();
        for c in &mut corpora {
            c.body_tokens = vec!["zzz".into(); 10];
        }
        assert!(matches!(Trainer::new(&corpora, &lex, &small_hp()), Err(Error::EmptyEffectiveCorpus)));
    }

    #[test]
    fn fused_step_equals_analytic_gradient() {
        let (corpora, lex) = toy();
        let trainer = Trainer::new(&corpora, &lex, &small_hp()).unwrap();
        let mut table = trainer.initial_table();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for v in table.matrices_mut().1.iter_mut() {
            *v = rng.random_range(-0.5..0.5);
        }
        let before = table.clone();
        let window =
            ContextWindow { center: SlotId::new(0), context: vec![SlotId::new(1), SlotId::new(2), SlotId::new(3)] };
        let negatives = vec![SlotId::new(4), SlotId::new(5)];
        let h = context_vector(&window, &before).unwrap();
        let grad = ns_loss_and_grad(window.center, &h, &negatives, &before).unwrap();

        let lr = 0.1;
        let mut scratch = Scratch::new(table.dim());
        scratch.context = window.context.clone();
        scratch.negatives = negatives.clone();
        let dim = table.dim();
        let (input, output) = table.matrices_mut();
        let loss = sgd_window(&mut Exclusive { dim, input, output }, window.center, lr, &mut scratch).unwrap();
        assert!((loss - grad.loss).abs() < 1e-12);

        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        let expect = |row: &[f64], g: &[f64]| -> Vec<f64> { row.iter().zip(g).map(|(r, g)| r - lr * g).collect() };
        assert!(close(table.output_row(window.center), &expect(before.output_row(window.center), &grad.center_output)));
        for (n, g) in negatives.iter().zip(&grad.negative_outputs) {
            assert!(close(table.output_row(*n), &expect(before.output_row(*n), g)));
        }
        let row_grad = grad.input_row_gradient(window.context.len());
        for c in &window.context {
            assert!(close(table.input_row(*c), &expect(before.input_row(*c), &row_grad)));
        }
    }

    /// Full-softmax log likelihood over the slots reachable in each field.
    fn softmax_log_likelihood(trainer: &Trainer, table: &EmbeddingTable, lex: &Lexicon) -> f64 {
        let mut total = 0.0;
        let mut ctx = Vec::new();
        for r in trainer.resolved() {
            let reachable: Vec<SlotId> =
                (0..lex.slot_count()).map(SlotId::new).filter(|s| lex.reachable_in(*s, r.field)).collect();
            for pos in 0..r.slots.len() {
                trainer.fill_window(&r.slots, pos, &mut ctx);
                let h = context_vector(&ContextWindow { center: r.slots[pos], context: ctx.clone() }, table).unwrap();
                let score = |s: SlotId| table.output_row(s).iter().zip(&h).map(|(u, x)| u * x).sum::<f64>();
                let log_z = reachable.iter().map(|s| score(*s).exp()).sum::<f64>().ln();
                total += score(r.slots[pos]) - log_z;
            }
        }
        total
    }

    #[test]
    fn negative_sampling_raises_softmax_likelihood() {
        let (corpora, lex) = toy();
        let trainer = Trainer::new(&corpora, &lex, &small_hp()).unwrap();
        let initial = trainer.initial_table();
        let (trained, _) = trainer.train().unwrap();
        let before = softmax_log_likelihood(&trainer, &initial, &lex);
        let after = softmax_log_likelihood(&trainer, &trained, &lex);
        assert!(after > before, "{before} -> {after}");
    }

    #[test]
    fn field_pass_leaves_foreign_rows_alone() {
        let (corpora, lex) = toy();
        let trainer = Trainer::new(&corpora, &lex, &small_hp()).unwrap();
        let mut table = trainer.initial_table();
        let b = lex.field_index("b").unwrap();
        let foreign: Vec<SlotId> =
            (0..lex.slot_count()).map(SlotId::new).filter(|s| lex.scope(*s) == Scope::Field(b)).collect();
        let snapshot: Vec<(Vec<f64>, Vec<f64>)> =
            foreign.iter().map(|s| (table.input_row(*s).to_vec(), table.output_row(*s).to_vec())).collect();
        trainer.field_pass(0, &mut table, 0.05, 3).unwrap();
        for (s, (i, o)) in foreign.iter().zip(&snapshot) {
            assert_eq!(table.input_row(*s), i.as_slice());
            assert_eq!(table.output_row(*s), o.as_slice());
        }
    }
}
