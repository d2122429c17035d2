//! Corpus BLEU and its document-level variants.
//!
//! Three scoring granularities share one matching core:
//!
//! - [`bleu`] — micro-aggregated over aligned sentence pairs.
//! - [`d_bleu`] — each document concatenated into a single segment before
//!   micro-aggregation, so sentence alignment is not required and n-grams
//!   may match across sentence boundaries.
//! - [`ds_bleu`] — one BLEU score per document (with effective n-gram order,
//!   so short documents are not zeroed out), macro-averaged without length
//!   weighting.
//!
//! Matching is case-sensitive over scoring tokens, orders 1–4, with the
//! standard exponential smoothing for zero-match orders: the k-th order with
//! zero matches gets precision 1/(2^k · possible).

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tokenizer::TokenSequence;

pub const MAX_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothing {
    None,
    Exponential,
}

/// One BLEU evaluation. `precisions` are post-smoothing, in [0, 1];
/// `matched` / `possible` are the raw clipped-match and n-gram totals they
/// were derived from. `orders` is how many orders entered the geometric mean.
#[derive(Clone, Debug, Serialize)]
pub struct BleuScore {
    pub score: f64,
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
    pub matched: [usize; MAX_ORDER],
    pub possible: [usize; MAX_ORDER],
    pub orders: usize,
}

/// Length penalty for hypotheses shorter than the reference: 1 when
/// `hyp_len >= ref_len`, else exp(1 - ref_len/hyp_len).
pub fn brevity_penalty(hyp_len: usize, ref_len: usize) -> Result<f64> {
    if hyp_len == 0 {
        return Err(Error::ZeroHypothesisLength);
    }
    if hyp_len >= ref_len {
        Ok(1.0)
    } else {
        Ok((1.0 - ref_len as f64 / hyp_len as f64).exp())
    }
}

#[derive(Default)]
struct MatchTotals {
    matched: [usize; MAX_ORDER],
    possible: [usize; MAX_ORDER],
    hyp_len: usize,
    ref_len: usize,
}

impl MatchTotals {
    fn add_pair(&mut self, hyp: &TokenSequence, reference: &TokenSequence) {
        self.hyp_len += hyp.len();
        self.ref_len += reference.len();
        for n in 1..=MAX_ORDER {
            let possible = hyp.len().saturating_sub(n - 1);
            self.possible[n - 1] += possible;
            if possible == 0 {
                continue;
            }
            let mut ref_counts: HashMap<&[String], usize> = HashMap::new();
            for gram in reference.tokens().windows(n) {
                *ref_counts.entry(gram).or_insert(0) += 1;
            }
            let mut hyp_counts: HashMap<&[String], usize> = HashMap::new();
            for gram in hyp.tokens().windows(n) {
                *hyp_counts.entry(gram).or_insert(0) += 1;
            }
            for (gram, count) in hyp_counts {
                if let Some(&available) = ref_counts.get(gram) {
                    self.matched[n - 1] += count.min(available);
                }
            }
        }
    }

    fn score(&self, smoothing: Smoothing, effective_order: bool) -> BleuScore {
        let mut precisions = [0.0; MAX_ORDER];
        if self.hyp_len == 0 {
            // Nothing to score; treated as total failure rather than an error
            // so that per-document loops can keep going.
            return BleuScore {
                score: 0.0,
                precisions,
                brevity_penalty: 0.0,
                hyp_len: 0,
                ref_len: self.ref_len,
                matched: self.matched,
                possible: self.possible,
                orders: 0,
            };
        }
        let bp = if self.hyp_len >= self.ref_len {
            1.0
        } else {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        };
        let mut included = 0;
        let mut smooth = 1.0;
        for (n, slot) in precisions.iter_mut().enumerate() {
            if self.possible[n] == 0 {
                break;
            }
            included = n + 1;
            if self.matched[n] == 0 {
                if smoothing == Smoothing::Exponential {
                    smooth *= 2.0;
                    *slot = 1.0 / (smooth * self.possible[n] as f64);
                }
            } else {
                *slot = self.matched[n] as f64 / self.possible[n] as f64;
            }
        }
        let orders = if effective_order { included } else { MAX_ORDER };
        let mut log_sum = 0.0;
        let mut any_zero = false;
        for &p in &precisions[..orders] {
            if p <= 0.0 {
                any_zero = true;
                break;
            }
            log_sum += p.ln();
        }
        let score = if any_zero || orders == 0 {
            0.0
        } else {
            100.0 * bp * (log_sum / orders as f64).exp()
        };
        BleuScore {
            score,
            precisions,
            brevity_penalty: bp,
            hyp_len: self.hyp_len,
            ref_len: self.ref_len,
            matched: self.matched,
            possible: self.possible,
            orders,
        }
    }
}

/// BLEU over pre-paired segments, micro-aggregated: clipped matches and
/// n-gram totals are summed over pairs before any precision is formed.
pub fn corpus_bleu(
    pairs: &[(TokenSequence, TokenSequence)],
    smoothing: Smoothing,
    effective_order: bool,
) -> Result<BleuScore> {
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut totals = MatchTotals::default();
    for (hyp, reference) in pairs {
        totals.add_pair(hyp, reference);
    }
    Ok(totals.score(smoothing, effective_order))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Sentence,
    Document,
}

#[derive(Clone, Debug)]
pub struct ScoredDocument {
    pub doc_id: String,
    pub hyp_segments: Vec<TokenSequence>,
    pub ref_segments: Vec<TokenSequence>,
}

/// A corpus ready for scoring. Sentence granularity asserts that every
/// document carries aligned segment counts; document granularity leaves the
/// counts free (d-BLEU and ds-BLEU never consult the alignment).
#[derive(Clone, Debug)]
pub struct ScoredCorpus {
    documents: Vec<ScoredDocument>,
    granularity: Granularity,
}

impl ScoredCorpus {
    pub fn new(documents: Vec<ScoredDocument>, granularity: Granularity) -> Result<Self> {
        if granularity == Granularity::Sentence {
            for doc in &documents {
                if doc.hyp_segments.len() != doc.ref_segments.len() {
                    return Err(Error::SegmentCountMismatch {
                        doc_id: doc.doc_id.clone(),
                        hyp: doc.hyp_segments.len(),
                        refs: doc.ref_segments.len(),
                    });
                }
            }
        }
        Ok(ScoredCorpus {
            documents,
            granularity,
        })
    }

    pub fn documents(&self) -> &[ScoredDocument] {
        &self.documents
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }
}

/// Sentence-level corpus BLEU. Requires aligned segment counts in every
/// document.
pub fn bleu(corpus: &ScoredCorpus) -> Result<BleuScore> {
    let mut pairs = Vec::new();
    for doc in corpus.documents() {
        if doc.hyp_segments.len() != doc.ref_segments.len() {
            return Err(Error::SegmentCountMismatch {
                doc_id: doc.doc_id.clone(),
                hyp: doc.hyp_segments.len(),
                refs: doc.ref_segments.len(),
            });
        }
        for (h, r) in doc.hyp_segments.iter().zip(&doc.ref_segments) {
            pairs.push((h.clone(), r.clone()));
        }
    }
    corpus_bleu(&pairs, Smoothing::Exponential, false)
}

/// Document-level BLEU: every document is concatenated into one segment per
/// side, then scored as one micro-aggregated corpus. N-grams may match across
/// the original sentence boundaries, and hypothesis sentence counts need not
/// line up with the reference.
pub fn d_bleu(corpus: &ScoredCorpus) -> Result<BleuScore> {
    let pairs: Vec<_> = corpus
        .documents()
        .iter()
        .map(|doc| {
            (
                TokenSequence::concat(doc.hyp_segments.iter()),
                TokenSequence::concat(doc.ref_segments.iter()),
            )
        })
        .collect();
    corpus_bleu(&pairs, Smoothing::Exponential, false)
}

#[derive(Clone, Debug, Serialize)]
pub struct DsBleuScore {
    /// Unweighted mean of the per-document scores.
    pub corpus_score: f64,
    pub per_document: Vec<(String, BleuScore)>,
}

/// Document-level BLEU, macro-averaged: each document is scored on its own
/// (concatenated, with effective n-gram order so short documents still get a
/// usable score) and the corpus score is the plain mean over documents. A
/// document with an empty hypothesis scores 0.
pub fn ds_bleu(corpus: &ScoredCorpus) -> Result<DsBleuScore> {
    if corpus.documents().is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut per_document = Vec::with_capacity(corpus.documents().len());
    let mut sum = 0.0;
    for doc in corpus.documents() {
        let mut totals = MatchTotals::default();
        totals.add_pair(
            &TokenSequence::concat(doc.hyp_segments.iter()),
            &TokenSequence::concat(doc.ref_segments.iter()),
        );
        let score = totals.score(Smoothing::Exponential, true);
        sum += score.score;
        per_document.push((doc.doc_id.clone(), score));
    }
    Ok(DsBleuScore {
        corpus_score: sum / per_document.len() as f64,
        per_document,
    })
}
