//! Corpus-local word vectors: skip-gram with negative sampling, emitting
//! the same table type the external-vector path uses. Training is
//! single-threaded and bit-deterministic by default; an opt-in lock-free
//! parallel mode trades that determinism for throughput.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{tokenize, Document};
use crate::embed::WordVectorTable;
use crate::error::{Error, Result};
use crate::numerics::RngSeed;

#[derive(Clone, Debug)]
pub struct SgnsConfig {
    pub dims: usize,
    /// Maximum symmetric context radius; the effective radius is drawn
    /// uniformly from [1, window] per center token.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Decays linearly to `min_lr` over all training positions.
    pub initial_lr: f64,
    pub min_lr: f64,
    pub min_count: u32,
    /// Frequent-token downsampling threshold.
    pub subsample_threshold: f64,
    pub seed: RngSeed,
    /// Worker count. 1 (the default) trains bit-deterministically; higher
    /// values shard documents across lock-free workers whose unsynchronized
    /// weight updates make results run-dependent.
    pub threads: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dims: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_lr: 1e-4,
            min_count: 5,
            subsample_threshold: 1e-3,
            seed: RngSeed(0),
            threads: 1,
        }
    }
}

impl SgnsConfig {
    fn validate(&self) -> Result<()> {
        if self.dims < 1 || self.window < 1 || self.epochs < 1 || self.min_count < 1 {
            return Err(Error::InvalidArgument(
                "dims, window, epochs, and min_count must all be at least 1".into(),
            ));
        }
        if self.initial_lr <= 0.0 || self.min_lr <= 0.0 || self.subsample_threshold <= 0.0 {
            return Err(Error::InvalidArgument(
                "learning rates and subsample threshold must be positive".into(),
            ));
        }
        if self.threads < 1 {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// The trained table plus the mean loss per epoch (negative log-sigmoid
/// objective over all updates of that epoch).
#[derive(Clone, Debug)]
pub struct SgnsOutcome {
    pub table: WordVectorTable,
    pub epoch_loss: Vec<f64>,
}

struct TrainingVocab {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: std::collections::HashMap<String, usize>,
    total: u64,
}

fn training_vocab(docs: &[Document], min_count: u32) -> Result<TrainingVocab> {
    let mut counts: std::collections::HashMap<String, u64> = std::collections::HashMap::new();
    for doc in docs {
        for tok in tokenize(&doc.text) {
            *counts.entry(tok).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(String, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count as u64)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    // Frequent tokens first; ties alphabetical, for a stable layout.
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let tokens: Vec<String> = kept.iter().map(|(t, _)| t.clone()).collect();
    let counts: Vec<u64> = kept.iter().map(|&(_, c)| c).collect();
    let total = counts.iter().sum();
    let index = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(TrainingVocab { tokens, counts, index, total })
}

/// Cumulative unigram^0.75 distribution for negative sampling.
fn negative_table(counts: &[u64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(counts.len());
    let mut acc = 0.0;
    for &c in counts {
        acc += (c as f64).powf(0.75);
        cum.push(acc);
    }
    for v in &mut cum {
        *v /= acc;
    }
    cum
}

fn sample_negative(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let r = rng.gen::<f64>();
    cum.partition_point(|&c| c < r).min(cum.len() - 1)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Weight cells are f32 bit patterns behind relaxed atomics: plain loads
/// and stores at one thread, and deliberately racy read-modify-write in
/// the parallel mode (lost updates are part of that bargain, as in the
/// original lock-free trainers).
#[inline]
fn w_get(w: &[AtomicU32], i: usize) -> f64 {
    f32::from_bits(w[i].load(Ordering::Relaxed)) as f64
}

#[inline]
fn w_add(w: &[AtomicU32], i: usize, dv: f64) {
    let old = f32::from_bits(w[i].load(Ordering::Relaxed));
    w[i].store((old + dv as f32).to_bits(), Ordering::Relaxed);
}

struct EpochShard<'a> {
    sequences: &'a [Vec<usize>],
    members: &'a [usize],
    rng: ChaCha8Rng,
}

struct SharedState<'a> {
    syn0: &'a [AtomicU32],
    syn1: &'a [AtomicU32],
    cum: &'a [f64],
    keep_prob: &'a [f64],
    seen: &'a AtomicU64,
    total_positions: u64,
}

/// Runs one epoch over one document shard, returning (loss sum, update
/// count).
fn run_shard(cfg: &SgnsConfig, state: &SharedState<'_>, mut shard: EpochShard<'_>) -> (f64, u64) {
    let dims = cfg.dims;
    let mut grad = vec![0.0f64; dims];
    let mut loss_sum = 0.0f64;
    let mut loss_n = 0u64;

    for &seq_idx in shard.members {
        let seq = &shard.sequences[seq_idx];
        // Subsampling decisions are per occurrence, inside the shard's
        // deterministic stream.
        let kept: Vec<usize> = seq
            .iter()
            .copied()
            .filter(|&w| state.keep_prob[w] >= 1.0 || shard.rng.gen::<f64>() < state.keep_prob[w])
            .collect();
        for (pos, &center) in kept.iter().enumerate() {
            let seen = state.seen.fetch_add(1, Ordering::Relaxed) + 1;
            let progress = seen as f64 / state.total_positions as f64;
            let lr = (cfg.initial_lr * (1.0 - progress)).max(cfg.min_lr);
            let radius = shard.rng.gen_range(1..=cfg.window);
            let lo = pos.saturating_sub(radius);
            let hi = (pos + radius).min(kept.len() - 1);
            for ctx_pos in lo..=hi {
                if ctx_pos == pos {
                    continue;
                }
                let context = kept[ctx_pos];
                let v_in = context * dims;
                grad.iter_mut().for_each(|g| *g = 0.0);

                // Positive pair plus sampled negatives share one
                // accumulated input-gradient.
                for neg in 0..=cfg.negatives {
                    let (target, label) = if neg == 0 {
                        (center, 1.0)
                    } else {
                        let mut cand = sample_negative(state.cum, &mut shard.rng);
                        if cand == center {
                            cand = sample_negative(state.cum, &mut shard.rng);
                        }
                        if cand == center {
                            continue;
                        }
                        (cand, 0.0)
                    };
                    let u_out = target * dims;
                    let mut dot = 0.0f64;
                    for d in 0..dims {
                        dot += w_get(state.syn0, v_in + d) * w_get(state.syn1, u_out + d);
                    }
                    let pred = sigmoid(dot);
                    loss_sum -= if label == 1.0 {
                        pred.max(1e-10).ln()
                    } else {
                        (1.0 - pred).max(1e-10).ln()
                    };
                    loss_n += 1;
                    let g = (label - pred) * lr;
                    for d in 0..dims {
                        grad[d] += g * w_get(state.syn1, u_out + d);
                        w_add(state.syn1, u_out + d, g * w_get(state.syn0, v_in + d));
                    }
                }
                for d in 0..dims {
                    w_add(state.syn0, v_in + d, grad[d]);
                }
            }
        }
    }
    (loss_sum, loss_n)
}

fn shard_rng(seed: RngSeed, thread: usize, epoch: usize) -> ChaCha8Rng {
    let mixed = seed
        .0
        .wrapping_add((thread as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add((epoch as u64).wrapping_mul(0xd1b5_4a32_d192_ed03));
    ChaCha8Rng::seed_from_u64(mixed)
}

pub fn train_sgns(docs: &[Document], cfg: &SgnsConfig) -> Result<SgnsOutcome> {
    cfg.validate()?;
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vocab = training_vocab(docs, cfg.min_count)?;
    let v = vocab.tokens.len();
    let dims = cfg.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.0);

    // Input vectors start uniform in ±0.5/dims, output vectors at zero —
    // the standard asymmetric start that breaks ties without biasing dot
    // products away from zero.
    let syn0: Vec<AtomicU32> = (0..v * dims)
        .map(|_| AtomicU32::new((((rng.gen::<f64>() - 0.5) / dims as f64) as f32).to_bits()))
        .collect();
    let syn1: Vec<AtomicU32> = (0..v * dims).map(|_| AtomicU32::new(0f32.to_bits())).collect();
    let cum = negative_table(&vocab.counts);

    // Documents as retained-token id sequences.
    let sequences: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| {
            tokenize(&d.text)
                .into_iter()
                .filter_map(|t| vocab.index.get(&t).copied())
                .collect()
        })
        .collect();
    let positions_per_epoch: u64 = sequences.iter().map(|s| s.len() as u64).sum();
    let total_positions = (positions_per_epoch * cfg.epochs as u64).max(1);

    let keep_prob: Vec<f64> = vocab
        .counts
        .iter()
        .map(|&c| {
            let f = c as f64 / vocab.total as f64;
            let t = cfg.subsample_threshold;
            ((t / f).sqrt() + t / f).min(1.0)
        })
        .collect();

    let threads = cfg.threads.min(sequences.len().max(1));
    let members: Vec<Vec<usize>> = {
        let mut m = vec![Vec::new(); threads];
        for i in 0..sequences.len() {
            m[i % threads].push(i);
        }
        m
    };

    let seen = AtomicU64::new(0);
    let state = SharedState {
        syn0: &syn0,
        syn1: &syn1,
        cum: &cum,
        keep_prob: &keep_prob,
        seen: &seen,
        total_positions,
    };

    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (loss_sum, loss_n) = if threads == 1 {
            run_shard(
                cfg,
                &state,
                EpochShard {
                    sequences: &sequences,
                    members: &members[0],
                    rng: shard_rng(cfg.seed, 0, epoch),
                },
            )
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = members
                    .iter()
                    .enumerate()
                    .map(|(ti, member_list)| {
                        let state = &state;
                        let sequences = &sequences;
                        scope.spawn(move || {
                            run_shard(
                                cfg,
                                state,
                                EpochShard {
                                    sequences,
                                    members: member_list,
                                    rng: shard_rng(cfg.seed, ti, epoch),
                                },
                            )
                        })
                    })
                    .collect();
                let mut sum = 0.0;
                let mut n = 0u64;
                for h in handles {
                    let (s, c) = h.join().expect("trainer worker panicked");
                    sum += s;
                    n += c;
                }
                (sum, n)
            })
        };
        epoch_loss.push(if loss_n > 0 { loss_sum / loss_n as f64 } else { 0.0 });
    }

    let mut table = WordVectorTable::new(dims);
    for (i, token) in vocab.tokens.iter().enumerate() {
        let row: Vec<f32> = (i * dims..(i + 1) * dims)
            .map(|j| f32::from_bits(syn0[j].load(Ordering::Relaxed)))
            .collect();
        table.insert(token.clone(), row)?;
    }
    Ok(SgnsOutcome { table, epoch_loss })
}

/// Standard cosine similarity; a zero vector on either side yields 0.
pub fn cosine(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "cosine operands".into(),
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        dot += x as f64 * y as f64;
        na += x as f64 * x as f64;
        nb += y as f64 * y as f64;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (na.sqrt() * nb.sqrt()))
}
