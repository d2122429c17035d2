//! Position-coverage diagnostics for long-context training schemes.
//!
//! When training sequences are shorter than the model's position budget, the
//! choice of starting offset decides which absolute positions ever receive
//! gradient. This module computes the exact offset distribution a scheme
//! assigns to a sequence of a given length, and aggregates a corpus of
//! lengths into a per-position coverage profile `P(i)` — the expected
//! fraction of sequences covering absolute position `i` (1-based).
//!
//! Three schemes are built in:
//!
//! - `baseline` — every sequence starts at offset 0; late positions are
//!   never trained.
//! - `shape` — the offset is uniform over every legal value `[0, M - l]`.
//! - `unifpe` — offsets are multiples of the sequence length, with the
//!   remainder `M mod l` inserted as a gap after a uniformly chosen block, so
//!   the final positions stay reachable; degenerates to offset 0 when the
//!   budget cannot fit two copies (`M < 2l`).

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact distribution over starting offsets for one sequence length under a
/// model position budget. Every supported offset `k` satisfies
/// `k + seq_len <= model_max`.
#[derive(Clone, Debug, Serialize)]
pub struct OffsetDistribution {
    support: BTreeMap<usize, f64>,
    pub seq_len: usize,
    pub model_max: usize,
}

impl OffsetDistribution {
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().map(|(&k, &p)| (k, p))
    }

    pub fn probability(&self, offset: usize) -> f64 {
        self.support.get(&offset).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.support.values().sum()
    }
}

fn check_len(seq_len: usize, model_max: usize) -> Result<()> {
    if seq_len < 1 || seq_len > model_max {
        return Err(Error::InvalidLength {
            len: seq_len,
            model_max,
        });
    }
    Ok(())
}

/// Offset 0 with probability 1.
pub fn baseline_offset_distribution(seq_len: usize, model_max: usize) -> Result<OffsetDistribution> {
    check_len(seq_len, model_max)?;
    Ok(OffsetDistribution {
        support: BTreeMap::from([(0, 1.0)]),
        seq_len,
        model_max,
    })
}

/// Uniform over all legal offsets `0..=model_max - seq_len`.
pub fn shape_offset_distribution(seq_len: usize, model_max: usize) -> Result<OffsetDistribution> {
    shape_offset_distribution_capped(seq_len, model_max, model_max)
}

/// Uniform over `0..=min(max_offset, model_max - seq_len)` — the variant
/// where the shift interval is fixed independently of sequence length.
pub fn shape_offset_distribution_capped(
    seq_len: usize,
    model_max: usize,
    max_offset: usize,
) -> Result<OffsetDistribution> {
    check_len(seq_len, model_max)?;
    let top = max_offset.min(model_max - seq_len);
    let p = 1.0 / (top + 1) as f64;
    Ok(OffsetDistribution {
        support: (0..=top).map(|k| (k, p)).collect(),
        seq_len,
        model_max,
    })
}

/// Block-aligned offsets: with `m = floor(model_max / seq_len)` copies
/// fitting the budget and remainder `r`, a gap index `g` is drawn uniformly
/// from `1..=m` (`g = m` meaning no gap) and the offset is `j * seq_len`,
/// `j` uniform over `0..m`, plus `r` for blocks at or past the gap. The
/// returned marginal is exact. When `model_max < 2 * seq_len` the scheme
/// keeps the sequence at offset 0.
pub fn unifpe_offset_distribution(seq_len: usize, model_max: usize) -> Result<OffsetDistribution> {
    check_len(seq_len, model_max)?;
    if model_max < 2 * seq_len {
        return Ok(OffsetDistribution {
            support: BTreeMap::from([(0, 1.0)]),
            seq_len,
            model_max,
        });
    }
    let m = model_max / seq_len;
    let r = model_max - m * seq_len;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for g in 1..=m {
        for j in 0..m {
            let offset = j * seq_len + if j >= g { r } else { 0 };
            *counts.entry(offset).or_insert(0) += 1;
        }
    }
    let denom = (m * m) as f64;
    Ok(OffsetDistribution {
        support: counts.into_iter().map(|(k, c)| (k, c as f64 / denom)).collect(),
        seq_len,
        model_max,
    })
}

/// The built-in offset schemes, as selected in reports and on the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OffsetSampler {
    Baseline,
    Shape,
    /// `shape` with a fixed maximum shift.
    ShapeCapped { max_offset: usize },
    UnifPe,
}

impl OffsetSampler {
    pub fn distribution(&self, seq_len: usize, model_max: usize) -> Result<OffsetDistribution> {
        match *self {
            OffsetSampler::Baseline => baseline_offset_distribution(seq_len, model_max),
            OffsetSampler::Shape => shape_offset_distribution(seq_len, model_max),
            OffsetSampler::ShapeCapped { max_offset } => {
                shape_offset_distribution_capped(seq_len, model_max, max_offset)
            }
            OffsetSampler::UnifPe => unifpe_offset_distribution(seq_len, model_max),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OffsetSampler::Baseline => "baseline",
            OffsetSampler::Shape => "shape",
            OffsetSampler::ShapeCapped { .. } => "shape-capped",
            OffsetSampler::UnifPe => "unifpe",
        }
    }
}

/// Draws one offset from the distribution. Deterministic given the RNG state.
pub fn sample_offset<R: Rng + ?Sized>(dist: &OffsetDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (k, p) in dist.support() {
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    // Rounding residue at u ~ 1.0 falls into the final bucket.
    last
}

/// Per-position expected coverage over a corpus: `position(i)` is the mean
/// over sequences of the probability that position `i` (1-based) falls inside
/// the sequence's placed span.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageProfile {
    values: Vec<f64>,
    pub model_max: usize,
    pub sequences: usize,
}

impl CoverageProfile {
    /// Coverage at 1-based position `i`.
    pub fn position(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.model_max, "position {i} out of 1..={}", self.model_max);
        self.values[i - 1]
    }

    /// All positions, index 0 holding position 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sums to the mean sequence length of the corpus (each sequence
    /// contributes probability mass equal to its length).
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Computes the exact coverage profile of `corpus_lengths` under `sampler`.
/// Fails if any sequence is empty or longer than the model budget.
pub fn coverage_profile(
    corpus_lengths: &[usize],
    sampler: OffsetSampler,
    model_max: usize,
) -> Result<CoverageProfile> {
    if corpus_lengths.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    for &len in corpus_lengths {
        if len > model_max {
            return Err(Error::LengthExceedsModelMax {
                len,
                model_max,
            });
        }
    }
    let n = corpus_lengths.len() as f64;
    // Difference array: a span [k+1, k+len] with weight w adds w at index k
    // and removes it at k+len.
    let mut diff = vec![0.0; model_max + 1];
    for &len in corpus_lengths {
        let dist = sampler.distribution(len, model_max)?;
        for (k, p) in dist.support() {
            debug_assert!(k + len <= model_max, "offset {k} overflows the budget");
            let w = p / n;
            diff[k] += w;
            diff[k + len] -= w;
        }
    }
    let mut values = Vec::with_capacity(model_max);
    let mut acc = 0.0;
    for d in &diff[..model_max] {
        acc += d;
        values.push(acc);
    }
    Ok(CoverageProfile {
        values,
        model_max,
        sequences: corpus_lengths.len(),
    })
}

/// Coefficient of variation of the profile over a 1-based inclusive position
/// range; lower means flatter coverage. Zero mean returns 0.
pub fn flatness(profile: &CoverageProfile, range: RangeInclusive<usize>) -> f64 {
    let (start, end) = (*range.start(), *range.end());
    assert!(start >= 1 && end <= profile.model_max && start <= end, "bad range {start}..={end}");
    let window = &profile.values()[start - 1..end];
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    let var = window.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / window.len() as f64;
    var.sqrt() / mean
}
