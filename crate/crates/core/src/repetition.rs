//! Detection of degenerate repetition in long translations.
//!
//! A translation is flagged when any contiguous run of `n` units appears at
//! two distinct start positions (overlapping occurrences count, so a token
//! repeated `n + 1` times in a row is already a repeat). The unit is the
//! scoring token by default; character mode catches degeneration inside
//! unsegmented scripts.

use std::collections::{BTreeMap, HashSet};
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tokenizer::{tokenize_scoring, TokenSequence};

/// Run length used when no override is given: long enough that natural
/// phrase re-use almost never triggers it.
pub const DEFAULT_REPEAT_LEN: usize = 10;

/// True iff some length-`n` window over `items` occurs at two distinct start
/// positions. Windows are deduplicated by hash with full element-wise
/// equality on collision, so there are no false positives.
pub fn has_repeated_run<T: Eq + Hash>(items: &[T], n: usize) -> bool {
    assert!(n >= 1, "run length must be at least 1");
    if items.len() < n + 1 {
        return false;
    }
    let mut seen: HashSet<&[T]> = HashSet::with_capacity(items.len() - n + 1);
    items.windows(n).any(|w| !seen.insert(w))
}

pub fn has_long_repeat(tokens: &TokenSequence, n: usize) -> bool {
    has_repeated_run(tokens.tokens(), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeatUnit {
    Token,
    Char,
}

/// Flags one translation: token mode applies scoring tokenization first,
/// char mode scans the raw character stream.
pub fn detect(text: &str, n: usize, unit: RepeatUnit) -> bool {
    match unit {
        RepeatUnit::Token => has_long_repeat(&tokenize_scoring(text), n),
        RepeatUnit::Char => {
            let chars: Vec<char> = text.chars().collect();
            has_repeated_run(&chars, n)
        }
    }
}

/// Repetition outcome for one (system, window) group of translations.
#[derive(Clone, Debug, Serialize)]
pub struct RepetitionReport {
    pub flagged: usize,
    pub total: usize,
    /// Per-document flags, keyed by doc id.
    pub per_document: BTreeMap<String, bool>,
    pub run_len: usize,
}

impl RepetitionReport {
    /// Fraction of translations in the group with a long repeat.
    pub fn rate(&self) -> f64 {
        self.flagged as f64 / self.total as f64
    }
}

/// Groups of translations keyed by (system, window label).
pub type TranslationGroups = BTreeMap<(String, String), Vec<(String, String)>>;

/// Computes the repetition rate of every group. Empty groups are an error —
/// a rate over zero translations would silently render as a plausible 0.
pub fn repetition_rates(
    groups: &TranslationGroups,
    n: usize,
    unit: RepeatUnit,
) -> Result<BTreeMap<(String, String), RepetitionReport>> {
    let mut out = BTreeMap::new();
    for ((system, window), docs) in groups {
        if docs.is_empty() {
            return Err(Error::EmptyGroup {
                group: format!("{system}:{window}"),
            });
        }
        let mut per_document = BTreeMap::new();
        let mut flagged = 0;
        for (doc_id, text) in docs {
            let hit = detect(text, n, unit);
            flagged += usize::from(hit);
            per_document.insert(doc_id.clone(), hit);
        }
        out.insert(
            (system.clone(), window.clone()),
            RepetitionReport {
                flagged,
                total: docs.len(),
                per_document,
                run_len: n,
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn words(s: &str) -> TokenSequence {
        TokenSequence::new(s.split_whitespace().map(str::to_owned).collect())
    }

    fn brute_force<T: Eq>(items: &[T], n: usize) -> bool {
        if items.len() < n {
            return false;
        }
        let windows: Vec<&[T]> = items.windows(n).collect();
        for i in 0..windows.len() {
            for j in i + 1..windows.len() {
                if windows[i] == windows[j] {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn overlapping_repeats_count() {
        let twelve = words(&"a ".repeat(12));
        assert!(has_long_repeat(&twelve, 10), "12 copies hold three 10-gram windows");
        let eleven = words(&"a ".repeat(11));
        assert!(has_long_repeat(&eleven, 10));
        let ten = words(&"a ".repeat(10));
        assert!(!has_long_repeat(&ten, 10), "a single window cannot repeat");
    }

    #[test]
    fn distinct_sequences_are_clean() {
        let seq = words("w0 w1 w2 w3 w4 w5 w6 w7 w8 w9 w10 w11 w12");
        assert!(!has_long_repeat(&seq, 10));
        assert!(!has_long_repeat(&seq, 1));
    }

    #[test]
    fn non_overlapping_phrase_repeat() {
        let phrase = "the quick brown fox jumps over the lazy dog again";
        let text = format!("{phrase} meanwhile something else entirely {phrase}");
        assert!(has_long_repeat(&words(&text), 10));
    }

    #[test]
    fn unigram_mode_flags_any_duplicate() {
        assert!(has_long_repeat(&words("a b a"), 1));
        assert!(!has_long_repeat(&words("a b c"), 1));
    }

    #[test]
    fn short_sequences_never_flag() {
        assert!(!has_long_repeat(&TokenSequence::empty(), 10));
        assert!(!has_long_repeat(&words("a b c"), 10));
    }

    #[test]
    fn char_mode_sees_inside_tokens() {
        assert!(detect("abcabc", 3, RepeatUnit::Char));
        assert!(!detect("abcabc", 3, RepeatUnit::Token), "one token, no token repeat");
        assert!(!detect("abcdef", 3, RepeatUnit::Char));
    }

    #[test]
    fn matches_brute_force_on_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let len = rng.gen_range(0..60);
            let alphabet = ["a", "b"];
            let tokens: Vec<String> = (0..len)
                .map(|_| alphabet[rng.gen_range(0..2)].to_string())
                .collect();
            for n in 1..=6 {
                assert_eq!(
                    has_repeated_run(&tokens, n),
                    brute_force(&tokens, n),
                    "len {len} n {n} tokens {tokens:?}"
                );
            }
        }
    }

    #[test]
    fn longer_repeats_imply_shorter_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let len = rng.gen_range(0..80);
            let alphabet = ["x", "y", "z"];
            let tokens: Vec<String> = (0..len)
                .map(|_| alphabet[rng.gen_range(0..3)].to_string())
                .collect();
            for n in 1..=8 {
                if has_repeated_run(&tokens, n + 1) {
                    assert!(
                        has_repeated_run(&tokens, n),
                        "repeat at {} but not {n}: {tokens:?}",
                        n + 1
                    );
                }
            }
        }
    }

    #[test]
    fn group_rates() {
        let mut groups = TranslationGroups::new();
        let looping = format!("stuck {} end", "in a loop in a loop in a loop in a loop ".repeat(2));
        groups.insert(
            ("sysA".into(), "256".into()),
            vec![
                ("d1".into(), "a perfectly ordinary translated document".into()),
                ("d2".into(), looping),
            ],
        );
        groups.insert(
            ("sysB".into(), "256".into()),
            vec![("d1".into(), "clean output here".into())],
        );
        let rates = repetition_rates(&groups, 10, RepeatUnit::Token).unwrap();
        let a = &rates[&("sysA".into(), "256".into())];
        assert_eq!((a.flagged, a.total), (1, 2));
        assert!((a.rate() - 0.5).abs() < 1e-12);
        assert!(!a.per_document["d1"], "clean document was flagged");
        assert!(a.per_document["d2"], "looping document was not flagged");
        assert_eq!(rates[&("sysB".into(), "256".into())].rate(), 0.0);
    }

    #[test]
    fn empty_group_is_an_error() {
        let mut groups = TranslationGroups::new();
        groups.insert(("sysA".into(), "512".into()), vec![]);
        let err = repetition_rates(&groups, 10, RepeatUnit::Token).unwrap_err();
        assert!(matches!(err, Error::EmptyGroup { ref group } if group == "sysA:512"));
    }
}
