//! Packing parallel documents into pseudo-documents under a length budget.
//!
//! Long-context fine-tuning wants training sequences near the model's
//! maximum length, but real documents are too long or too short. The
//! builders here cut each document into consecutive sentence spans:
//!
//! - [`build_gaussian_corpus`] — span budgets follow the corpus's own
//!   document-length distribution, rescaled so its mass sits below `max_len`.
//! - [`build_uniform_corpus`] — span budgets drawn uniformly from
//!   `[128, max_len]`, giving a flat mix of lengths.
//! - [`build_fixed_length_testset`] — deterministic greedy fill to `max_len`,
//!   with a short final fragment merged into its predecessor so test
//!   documents don't end in slivers.
//!
//! Sentence order is never changed and every sentence lands in exactly one
//! pseudo-document, so concatenating the spans reproduces the corpus.
//! Lengths are source-side token counts under the caller's measurement
//! scheme.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A final fragment shorter than this is merged into the preceding
/// pseudo-document by the test-set builder.
pub const TAIL_MERGE_MIN: usize = 50;

/// Lower bound of the uniform budget draw.
pub const UNIFORM_MIN_BUDGET: usize = 128;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SentencePair {
    pub src: String,
    pub tgt: String,
    /// Source-side length under the corpus's measurement scheme.
    pub src_len: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DocumentPair {
    pub doc_id: String,
    pub pairs: Vec<SentencePair>,
}

impl DocumentPair {
    pub fn total_src_len(&self) -> usize {
        self.pairs.iter().map(|p| p.src_len).sum()
    }

    pub fn min_src_len(&self) -> Option<usize> {
        self.pairs.iter().map(|p| p.src_len).min()
    }
}

/// Why a pseudo-document was allowed to exceed its budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanFlag {
    /// A single sentence longer than the drawn budget forms its own span.
    OversizedSentence,
    /// A short final fragment was folded into this span.
    MergedTail,
}

/// One consecutive sentence span `[start, end)` of an origin document.
#[derive(Clone, Debug, Serialize)]
pub struct PseudoDocument {
    pub doc_id: String,
    /// Running index of this span within its origin document.
    pub piece: usize,
    pub start: usize,
    pub end: usize,
    /// Total source length of the covered sentences.
    pub src_len: usize,
    /// The budget this span was packed against.
    pub budget: usize,
    pub flag: Option<SpanFlag>,
}

impl PseudoDocument {
    pub fn sentence_count(&self) -> usize {
        self.end - self.start
    }

    /// The sentence pairs this span covers.
    pub fn slice<'a>(&self, doc: &'a DocumentPair) -> &'a [SentencePair] {
        &doc.pairs[self.start..self.end]
    }
}

/// Greedy packing of one document: draw a budget, take sentences while they
/// fit, repeat. A sentence that alone exceeds its budget becomes its own
/// flagged span, so packing always makes progress and never reorders.
pub fn pack_with_budgets(
    doc: &DocumentPair,
    mut draw_budget: impl FnMut() -> usize,
) -> Vec<PseudoDocument> {
    let lens: Vec<usize> = doc.pairs.iter().map(|p| p.src_len).collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < lens.len() {
        let budget = draw_budget();
        let mut total = 0;
        let mut j = i;
        while j < lens.len() && total + lens[j] <= budget {
            total += lens[j];
            j += 1;
        }
        let mut flag = None;
        if j == i {
            total = lens[i];
            j = i + 1;
            flag = Some(SpanFlag::OversizedSentence);
        }
        spans.push(PseudoDocument {
            doc_id: doc.doc_id.clone(),
            piece: spans.len(),
            start: i,
            end: j,
            src_len: total,
            budget,
            flag,
        });
        i = j;
    }
    spans
}

/// Gaussian with the sample moments of a corpus's document lengths.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mean: f64,
    pub std: f64,
}

/// Fits sample mean and (n-1) standard deviation to full-document lengths.
/// Needs at least two documents and nonzero variance.
pub fn fit_length_distribution(doc_lengths: &[usize]) -> Result<GaussianParams> {
    if doc_lengths.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: doc_lengths.len(),
        });
    }
    let n = doc_lengths.len() as f64;
    let mean = doc_lengths.iter().sum::<usize>() as f64 / n;
    let var = doc_lengths
        .iter()
        .map(|&l| (l as f64 - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    if var == 0.0 {
        return Err(Error::InsufficientVariance);
    }
    Ok(GaussianParams {
        mean,
        std: var.sqrt(),
    })
}

/// Per-document RNG derived from the run seed and the document id, so the
/// outcome is independent of processing order.
fn doc_rng(seed: u64, doc_id: &str) -> ChaCha8Rng {
    // FNV-1a over the id; mixed into the key alongside the run seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in doc_id.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&h.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Draws from `normal` until the rounded value lands in `[lo, hi)`; a
/// pathological window falls back to the clamped mean so builds always
/// terminate deterministically.
fn rejection_sample(normal: &Normal<f64>, rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    debug_assert!(hi >= 1);
    for _ in 0..1000 {
        let drawn = normal.sample(rng).round();
        if drawn >= lo as f64 && drawn < hi as f64 {
            return drawn as usize;
        }
    }
    normal.mean().round().clamp(lo as f64, (hi - 1) as f64) as usize
}

/// How the Gaussian budget distribution was derived, for run metadata.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaussianBuildInfo {
    pub source: GaussianParams,
    /// `max_len / longest document length`; both moments are multiplied by it.
    pub scale: f64,
    pub scaled: GaussianParams,
}

/// Packs with budgets drawn from the fitted document-length Gaussian,
/// rescaled by `max_len / max(document length)` and rejection-sampled into
/// `[shortest sentence of the document, max_len)`. Budgets are redrawn for
/// every span.
pub fn build_gaussian_corpus(
    docs: &[DocumentPair],
    max_len: usize,
    params: &GaussianParams,
    seed: u64,
) -> Result<(Vec<PseudoDocument>, GaussianBuildInfo)> {
    let longest = docs.iter().map(DocumentPair::total_src_len).max().unwrap_or(0);
    if longest == 0 {
        return Err(Error::EmptyCorpus);
    }
    let scale = max_len as f64 / longest as f64;
    let scaled = GaussianParams {
        mean: params.mean * scale,
        std: params.std * scale,
    };
    let normal = Normal::new(scaled.mean, scaled.std)
        .expect("fit_length_distribution guarantees a positive std");
    let mut spans = Vec::new();
    for doc in docs {
        let mut rng = doc_rng(seed, &doc.doc_id);
        let lo = doc.min_src_len().unwrap_or(1).max(1);
        spans.extend(pack_with_budgets(doc, || {
            rejection_sample(&normal, &mut rng, lo, max_len.max(2))
        }));
    }
    Ok((
        spans,
        GaussianBuildInfo {
            source: *params,
            scale,
            scaled,
        },
    ))
}

/// Packs with budgets drawn uniformly from `[128, max_len]` (lower bound
/// clamped down for tiny budgets). Budgets are redrawn for every span.
pub fn build_uniform_corpus(
    docs: &[DocumentPair],
    max_len: usize,
    seed: u64,
) -> Result<Vec<PseudoDocument>> {
    if max_len == 0 {
        return Err(Error::InvalidLength {
            len: 0,
            model_max: 0,
        });
    }
    let lo = UNIFORM_MIN_BUDGET.min(max_len);
    let mut spans = Vec::new();
    for doc in docs {
        let mut rng = doc_rng(seed, &doc.doc_id);
        spans.extend(pack_with_budgets(doc, || rng.gen_range(lo..=max_len)));
    }
    Ok(spans)
}

/// Deterministic evaluation splits: every budget is `max_len`, and a final
/// fragment shorter than [`TAIL_MERGE_MIN`] is merged into the preceding
/// span even when that pushes it past the budget.
pub fn build_fixed_length_testset(docs: &[DocumentPair], max_len: usize) -> Vec<PseudoDocument> {
    let mut spans = Vec::new();
    for doc in docs {
        let mut doc_spans = pack_with_budgets(doc, || max_len);
        if doc_spans.len() >= 2 && doc_spans.last().unwrap().src_len < TAIL_MERGE_MIN {
            let tail = doc_spans.pop().unwrap();
            let prev = doc_spans.last_mut().unwrap();
            prev.end = tail.end;
            prev.src_len += tail.src_len;
            prev.flag = Some(SpanFlag::MergedTail);
        }
        spans.extend(doc_spans);
    }
    spans
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CorpusStats {
    pub count: usize,
    pub mean: f64,
    pub min: usize,
    pub max: usize,
}

/// Count/mean/min/max of a list of lengths.
pub fn corpus_stats(lengths: &[usize]) -> Result<CorpusStats> {
    if lengths.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(CorpusStats {
        count: lengths.len(),
        mean: lengths.iter().sum::<usize>() as f64 / lengths.len() as f64,
        min: *lengths.iter().min().unwrap(),
        max: *lengths.iter().max().unwrap(),
    })
}
