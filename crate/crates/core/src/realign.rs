//! Resegmentation of unsegmented hypothesis text against reference sentences.
//!
//! A document translated as one long string (or with its own sentence
//! boundaries) cannot be scored against per-sentence references or metrics
//! that need aligned pairs. [`mwer_segment`] cuts the hypothesis token stream
//! into exactly one segment per reference sentence, choosing the cut points
//! that minimize the total word-level edit distance — the classic
//! minimum-WER segmentation. Segments may be empty; [`AlignmentResult`]
//! counts them, since a high empty-alignment count is itself a diagnostic
//! (the system dropped or fused content).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tokenizer::TokenSequence;

const INF: usize = usize::MAX / 2;

/// Word-level Levenshtein distance with unit insert/delete/substitute costs.
pub fn word_edit_distance(a: &[String], b: &[String]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, at) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (k, bt) in b.iter().enumerate() {
            let sub = diag + usize::from(at != bt);
            diag = row[k + 1];
            row[k + 1] = sub.min(row[k] + 1).min(row[k + 1] + 1);
        }
    }
    row[b.len()]
}

/// Cut points into the hypothesis token stream: `cut_points[j]..cut_points[j+1]`
/// is the segment aligned to reference sentence `j`. Always starts at 0 and
/// ends at the hypothesis length; segments may be empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub cut_points: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct AlignmentResult {
    /// One (hypothesis segment, reference sentence) pair per reference.
    pub pairs: Vec<(TokenSequence, TokenSequence)>,
    /// Sum of the per-pair word edit distances; globally minimal.
    pub total_cost: usize,
    /// Number of empty hypothesis segments.
    pub empty_count: usize,
}

/// Minimum edit distance of every prefix of `hyp` against the whole of
/// `reference`: `out[d] = ed(hyp[..d], reference)`.
fn prefix_costs(hyp: &[String], reference: &[String]) -> Vec<usize> {
    let r = reference.len();
    let mut dp: Vec<usize> = (0..=r).collect();
    let mut out = Vec::with_capacity(hyp.len() + 1);
    out.push(dp[r]);
    for (i, ht) in hyp.iter().enumerate() {
        let mut diag = dp[0];
        dp[0] = i + 1;
        for (k, rt) in reference.iter().enumerate() {
            let sub = diag + usize::from(ht != rt);
            diag = dp[k + 1];
            dp[k + 1] = sub.min(dp[k] + 1).min(dp[k + 1] + 1);
        }
        out.push(dp[r]);
    }
    out
}

/// One layer of the segmental DP: given `prev[t]` = best cost of aligning all
/// earlier references to `hyp[..t]`, returns `next[t]` = best cost of also
/// aligning `reference` to some `hyp[t'..t]` with `t' >=` the earlier cuts.
fn advance_layer(prev: &[usize], hyp: &[String], reference: &[String]) -> Vec<usize> {
    let t_len = hyp.len();
    let r_len = reference.len();
    let mut next = vec![INF; t_len + 1];
    // col[k] = min over t' of prev[t'] + ed(hyp[t'..t], reference[..k])
    let mut col: Vec<usize> = (0..=r_len).map(|k| prev[0].saturating_add(k)).collect();
    next[0] = col[r_len];
    for t in 1..=t_len {
        let mut diag = col[0];
        col[0] = prev[t].min(col[0].saturating_add(1));
        for k in 1..=r_len {
            let sub = diag.saturating_add(usize::from(hyp[t - 1] != reference[k - 1]));
            diag = col[k];
            col[k] = sub
                .min(col[k - 1].saturating_add(1))
                .min(col[k].saturating_add(1));
        }
        next[t] = col[r_len];
    }
    next
}

/// Suffix costs: `back[j][t]` = minimal cost of aligning references `j..`
/// to `hyp[t..]`. Computed by running the forward DP on the reversed problem.
fn suffix_costs(hyp: &[String], refs: &[TokenSequence]) -> Vec<Vec<usize>> {
    let t_len = hyp.len();
    let s = refs.len();
    let rev_hyp: Vec<String> = hyp.iter().rev().cloned().collect();
    let mut layer = vec![INF; t_len + 1];
    layer[0] = 0;
    let mut back = vec![vec![INF; t_len + 1]; s + 2];
    back[s + 1][t_len] = 0;
    for (k, reference) in refs.iter().rev().enumerate() {
        let rev_ref: Vec<String> = reference.tokens().iter().rev().cloned().collect();
        layer = advance_layer(&layer, &rev_hyp, &rev_ref);
        let j = s - k; // layer now covers references j..=s
        for t in 0..=t_len {
            back[j][t] = layer[t_len - t];
        }
    }
    back
}

/// Aligns `hyp` to `refs` by minimum total word edit distance. Among all
/// optimal segmentations, the one whose cut-point tuple is lexicographically
/// smallest is returned (ties resolve toward earlier cuts).
///
/// `refs` must be non-empty; the hypothesis may be empty, in which case every
/// segment is empty and the cost is the total reference length.
pub fn mwer_segment(hyp: &TokenSequence, refs: &[TokenSequence]) -> (Segmentation, AlignmentResult) {
    assert!(!refs.is_empty(), "mwer_segment needs at least one reference sentence");
    let tokens = hyp.tokens();
    let t_len = tokens.len();
    let s = refs.len();

    let mut forward = vec![INF; t_len + 1];
    forward[0] = 0;
    for reference in refs {
        forward = advance_layer(&forward, tokens, reference.tokens());
    }
    let total = forward[t_len];

    let back = suffix_costs(tokens, refs);
    debug_assert_eq!(back[1][0], total, "forward and backward totals must agree");

    // Greedy left-to-right reconstruction: the earliest feasible cut at each
    // step yields the lexicographically smallest optimal tuple.
    let mut cuts = vec![0usize];
    let mut acc = 0usize;
    let mut pairs = Vec::with_capacity(s);
    for (j, reference) in refs.iter().enumerate() {
        let start = cuts[j];
        let costs = prefix_costs(&tokens[start..], reference.tokens());
        let cut = if j + 1 == s {
            t_len
        } else {
            (start..=t_len)
                .find(|&t| acc + costs[t - start] + back[j + 2][t] == total)
                .expect("an optimal continuation must exist")
        };
        acc += costs[cut - start];
        cuts.push(cut);
        pairs.push((
            TokenSequence::new(tokens[start..cut].to_vec()),
            reference.clone(),
        ));
    }
    debug_assert_eq!(acc, total, "reconstructed cost must match the DP optimum");

    let empty_count = pairs.iter().filter(|(h, _)| h.is_empty()).count();
    (
        Segmentation { cut_points: cuts },
        AlignmentResult {
            pairs,
            total_cost: total,
            empty_count,
        },
    )
}

/// External per-sentence scores keyed by (doc_id, reference index).
pub type SentenceScores = BTreeMap<(String, usize), f64>;

#[derive(Clone, Debug)]
pub struct AttachedScores {
    /// Mean score per document, in input order.
    pub per_document: Vec<(String, f64)>,
    /// Unweighted mean of the document means.
    pub corpus_mean: f64,
}

/// Joins per-sentence scores (e.g. from a neural metric run on the realigned
/// pairs) back onto alignment results. Every aligned pair must have a score;
/// document means are macro-averaged into the corpus mean so long documents
/// do not dominate.
pub fn attach_scores(
    results: &[(String, AlignmentResult)],
    scores: &SentenceScores,
) -> Result<AttachedScores> {
    if results.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut per_document = Vec::with_capacity(results.len());
    let mut doc_mean_sum = 0.0;
    for (doc_id, result) in results {
        let mut sum = 0.0;
        for ref_index in 0..result.pairs.len() {
            let key = (doc_id.clone(), ref_index);
            let score = scores.get(&key).ok_or_else(|| Error::MissingScore {
                doc_id: doc_id.clone(),
                ref_index,
            })?;
            sum += score;
        }
        let mean = sum / result.pairs.len() as f64;
        doc_mean_sum += mean;
        per_document.push((doc_id.clone(), mean));
    }
    Ok(AttachedScores {
        corpus_mean: doc_mean_sum / per_document.len() as f64,
        per_document,
    })
}
