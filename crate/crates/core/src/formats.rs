//! Plain-text, TSV, and JSONL interchange.
//!
//! Corpora travel as marker-delimited text: a `# doc <id>` line opens a
//! document and every following non-blank line is one sentence. Scores and
//! length counts travel as headerless TSV with `#` comments. Document
//! records travel as JSONL. All parsers report 1-based line numbers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::databuild::{DocumentPair, PseudoDocument, SentencePair, SpanFlag};
use crate::error::{Error, Result};
use crate::metrics::{Granularity, ScoredCorpus, ScoredDocument};
use crate::realign::SentenceScores;
use crate::stats::{PositionBucketSet, PositionSentence, ScoreTable, POSITION_BUCKETS};
use crate::tokenizer::{sentence_length, tokenize_scoring, LengthScheme};

const DOC_MARKER: &str = "# doc ";

/// A document as it appears in marker-delimited text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub sentences: Vec<String>,
}

/// Canonical id of one sentence: `<doc_id>:<0-based index>`. External length
/// tables and position tables key on this.
pub fn sentence_id(doc_id: &str, index: usize) -> String {
    format!("{doc_id}:{index}")
}

/// Parses marker-delimited corpus text. Blank lines are skipped; content
/// before the first marker and duplicate document ids are errors.
pub fn parse_corpus_text(text: &str) -> Result<Vec<RawDocument>> {
    let mut docs: Vec<RawDocument> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(rest) = line.strip_prefix(DOC_MARKER) {
            let doc_id = rest.trim();
            if doc_id.is_empty() {
                return Err(Error::parse(lineno, "document marker has no id"));
            }
            if seen.insert(doc_id.to_string(), lineno).is_some() {
                return Err(Error::parse(
                    lineno,
                    format!("duplicate document id {doc_id:?}"),
                ));
            }
            docs.push(RawDocument {
                doc_id: doc_id.to_string(),
                sentences: Vec::new(),
            });
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match docs.last_mut() {
            Some(doc) => doc.sentences.push(line.trim_end().to_string()),
            None => return Err(Error::MissingBoundary { line: lineno }),
        }
    }
    Ok(docs)
}

/// Renders documents back to marker-delimited text.
pub fn write_corpus_text(docs: &[RawDocument]) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str(DOC_MARKER);
        out.push_str(&doc.doc_id);
        out.push('\n');
        for sentence in &doc.sentences {
            out.push_str(sentence);
            out.push('\n');
        }
    }
    out
}

/// Zips source and target sides into [`DocumentPair`]s, measuring source
/// lengths under `scheme`. Ids must match pairwise in order and each
/// document needs aligned sentence counts.
pub fn pair_documents(
    src: &[RawDocument],
    tgt: &[RawDocument],
    scheme: &LengthScheme,
) -> Result<Vec<DocumentPair>> {
    if src.len() != tgt.len() {
        return Err(Error::ParallelDocCount {
            src: src.len(),
            tgt: tgt.len(),
        });
    }
    let mut docs = Vec::with_capacity(src.len());
    for (index, (s, t)) in src.iter().zip(tgt).enumerate() {
        if s.doc_id != t.doc_id {
            return Err(Error::ParallelDocId {
                index,
                src: s.doc_id.clone(),
                tgt: t.doc_id.clone(),
            });
        }
        if s.sentences.len() != t.sentences.len() {
            return Err(Error::ParallelCountMismatch {
                doc_id: s.doc_id.clone(),
                src: s.sentences.len(),
                tgt: t.sentences.len(),
            });
        }
        let mut pairs = Vec::with_capacity(s.sentences.len());
        for (i, (ss, ts)) in s.sentences.iter().zip(&t.sentences).enumerate() {
            let src_len = sentence_length(ss, scheme, &sentence_id(&s.doc_id, i))?;
            pairs.push(SentencePair {
                src: ss.clone(),
                tgt: ts.clone(),
                src_len,
            });
        }
        docs.push(DocumentPair {
            doc_id: s.doc_id.clone(),
            pairs,
        });
    }
    Ok(docs)
}

/// One hypothesis/reference document on a scoring JSONL line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoringRecord {
    pub doc_id: String,
    pub hyp: Vec<String>,
    #[serde(rename = "ref")]
    pub reference: Vec<String>,
}

/// Parses scoring JSONL; blank lines are skipped, duplicate ids rejected.
pub fn read_scoring_jsonl(text: &str) -> Result<Vec<ScoringRecord>> {
    let mut records: Vec<ScoringRecord> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: ScoringRecord = serde_json::from_str(line)
            .map_err(|e| Error::parse(lineno, format!("bad scoring record: {e}")))?;
        if seen.insert(record.doc_id.clone(), lineno).is_some() {
            return Err(Error::parse(
                lineno,
                format!("duplicate document id {:?}", record.doc_id),
            ));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_scoring_jsonl(records: &[ScoringRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("scoring records are plain data"));
        out.push('\n');
    }
    out
}

/// Tokenizes scoring records into a corpus at the requested granularity.
pub fn scoring_corpus(records: &[ScoringRecord], granularity: Granularity) -> Result<ScoredCorpus> {
    let documents = records
        .iter()
        .map(|r| ScoredDocument {
            doc_id: r.doc_id.clone(),
            hyp_segments: r.hyp.iter().map(|s| tokenize_scoring(s)).collect(),
            ref_segments: r.reference.iter().map(|s| tokenize_scoring(s)).collect(),
        })
        .collect();
    ScoredCorpus::new(documents, granularity)
}

/// One pseudo-document on a build-output JSONL line. `doc_id` is
/// `<origin>#<piece>`; `start`/`end` index sentences of the origin document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudoDocRecord {
    pub doc_id: String,
    pub origin: String,
    pub start: usize,
    pub end: usize,
    pub src_len: usize,
    pub budget: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flag: Option<String>,
    pub src: Vec<String>,
    pub tgt: Vec<String>,
}

impl PseudoDocRecord {
    pub fn from_span(span: &PseudoDocument, origin: &DocumentPair) -> Self {
        let pairs = span.slice(origin);
        PseudoDocRecord {
            doc_id: format!("{}#{}", span.doc_id, span.piece),
            origin: span.doc_id.clone(),
            start: span.start,
            end: span.end,
            src_len: span.src_len,
            budget: span.budget,
            flag: span.flag.map(|f| {
                match f {
                    SpanFlag::OversizedSentence => "oversized_sentence",
                    SpanFlag::MergedTail => "merged_tail",
                }
                .to_string()
            }),
            src: pairs.iter().map(|p| p.src.clone()).collect(),
            tgt: pairs.iter().map(|p| p.tgt.clone()).collect(),
        }
    }
}

pub fn write_pseudo_jsonl(records: &[PseudoDocRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("pseudo-doc records are plain data"));
        out.push('\n');
    }
    out
}

/// One realigned hypothesis segment, paired to a reference sentence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealignedRecord {
    pub doc_id: String,
    pub ref_index: usize,
    pub hyp: String,
}

pub fn write_realigned_jsonl(records: &[RealignedRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("realigned records are plain data"));
        out.push('\n');
    }
    out
}

fn split_columns(line: &str, lineno: usize, want: usize) -> Result<Vec<&str>> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != want {
        return Err(Error::parse(
            lineno,
            format!("expected {want} tab-separated columns, got {}", cols.len()),
        ));
    }
    Ok(cols)
}

fn parse_score(text: &str, lineno: usize) -> Result<f64> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad score {text:?}")))?;
    if !value.is_finite() {
        return Err(Error::parse(lineno, format!("non-finite score {text:?}")));
    }
    Ok(value)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line))
        .filter(|(_, line)| !line.trim().is_empty() && !line.trim_start().starts_with('#'))
}

/// Reads a score table from `config_id \t unit_id \t score` lines.
pub fn read_score_table(text: &str, metric: &str) -> Result<ScoreTable> {
    let mut table = ScoreTable::new(metric);
    for (lineno, line) in data_lines(text) {
        let cols = split_columns(line, lineno, 3)?;
        let (config, unit) = (cols[0].trim(), cols[1].trim());
        if config.is_empty() || unit.is_empty() {
            return Err(Error::parse(lineno, "empty config or unit id"));
        }
        table.insert(config, unit, parse_score(cols[2], lineno)?);
    }
    Ok(table)
}

/// Renders a score table as `config_id \t unit_id \t score` lines in
/// deterministic key order.
pub fn write_score_table(table: &ScoreTable) -> String {
    let mut out = String::new();
    for config in table.configs() {
        for (unit, score) in table.units(config).expect("config came from the table") {
            out.push_str(&format!("{config}\t{unit}\t{score}\n"));
        }
    }
    out
}

/// Reads per-sentence scores from `doc_id \t ref_index \t score` lines.
pub fn read_sentence_scores(text: &str) -> Result<SentenceScores> {
    let mut scores = SentenceScores::new();
    for (lineno, line) in data_lines(text) {
        let cols = split_columns(line, lineno, 3)?;
        let ref_index: usize = cols[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad sentence index {:?}", cols[1])))?;
        scores.insert(
            (cols[0].trim().to_string(), ref_index),
            parse_score(cols[2], lineno)?,
        );
    }
    Ok(scores)
}

/// Reads position-bucket tables from `system \t sentence_id \t position \t
/// score` lines. Every (system, sentence) pair must supply exactly
/// [`POSITION_BUCKETS`] rows; rows may arrive in any order.
pub fn read_position_tables(text: &str) -> Result<BTreeMap<String, PositionBucketSet>> {
    let mut grouped: BTreeMap<String, BTreeMap<String, Vec<(usize, f64)>>> = BTreeMap::new();
    for (lineno, line) in data_lines(text) {
        let cols = split_columns(line, lineno, 4)?;
        let position: usize = cols[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad position {:?}", cols[2])))?;
        grouped
            .entry(cols[0].trim().to_string())
            .or_default()
            .entry(cols[1].trim().to_string())
            .or_default()
            .push((position, parse_score(cols[3], lineno)?));
    }
    let mut tables = BTreeMap::new();
    for (system, sentences) in grouped {
        let mut rows = Vec::with_capacity(sentences.len());
        for (sid, mut buckets) in sentences {
            if buckets.len() != POSITION_BUCKETS {
                return Err(Error::IncompleteBucket {
                    sentence_id: sid,
                    expected: POSITION_BUCKETS,
                    got: buckets.len(),
                });
            }
            buckets.sort_by_key(|&(p, _)| p);
            let mut positions = [0usize; POSITION_BUCKETS];
            let mut scores = [0f64; POSITION_BUCKETS];
            for (slot, (p, s)) in buckets.into_iter().enumerate() {
                positions[slot] = p;
                scores[slot] = s;
            }
            rows.push(PositionSentence {
                sentence_id: sid,
                positions,
                scores,
            });
        }
        tables.insert(system, PositionBucketSet::new(rows)?);
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_text_round_trips() {
        let text = "# doc news-1\nFirst sentence.\nSecond sentence.\n# doc news-2\nOnly one.\n";
        let docs = parse_corpus_text(text).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].doc_id, "news-1");
        assert_eq!(docs[0].sentences.len(), 2);
        assert_eq!(docs[1].sentences, vec!["Only one.".to_string()]);
        assert_eq!(write_corpus_text(&docs), text, "render must invert parse");
    }

    #[test]
    fn corpus_text_skips_blank_lines() {
        let docs = parse_corpus_text("# doc a\n\none\n\ntwo\n").unwrap();
        assert_eq!(docs[0].sentences, vec!["one", "two"]);
    }

    #[test]
    fn content_before_marker_reports_its_line() {
        let err = parse_corpus_text("\nstray sentence\n").unwrap_err();
        assert!(
            matches!(err, Error::MissingBoundary { line: 2 }),
            "got {err:?}"
        );
    }

    #[test]
    fn duplicate_doc_ids_are_rejected() {
        let err = parse_corpus_text("# doc a\nx\n# doc a\ny\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "got {err:?}");
    }

    #[test]
    fn pairing_checks_ids_and_counts() {
        let src = parse_corpus_text("# doc a\none two\n# doc b\nthree\n").unwrap();
        let tgt_ok = parse_corpus_text("# doc a\neins zwei\n# doc b\ndrei\n").unwrap();
        let docs = pair_documents(&src, &tgt_ok, &LengthScheme::Whitespace).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].pairs[0].src_len, 2);
        assert_eq!(docs[1].pairs[0].tgt, "drei");

        let tgt_shuffled = parse_corpus_text("# doc b\ndrei\n# doc a\neins zwei\n").unwrap();
        assert!(matches!(
            pair_documents(&src, &tgt_shuffled, &LengthScheme::Whitespace),
            Err(Error::ParallelDocId { index: 0, .. })
        ));

        let tgt_short = parse_corpus_text("# doc a\neins zwei\n").unwrap();
        assert!(matches!(
            pair_documents(&src, &tgt_short, &LengthScheme::Whitespace),
            Err(Error::ParallelDocCount { src: 2, tgt: 1 })
        ));

        let tgt_missing = parse_corpus_text("# doc a\neins zwei\nextra\n# doc b\ndrei\n").unwrap();
        assert!(matches!(
            pair_documents(&src, &tgt_missing, &LengthScheme::Whitespace),
            Err(Error::ParallelCountMismatch { src: 1, tgt: 2, .. })
        ));
    }

    #[test]
    fn scoring_jsonl_round_trips() {
        let records = vec![ScoringRecord {
            doc_id: "d1".into(),
            hyp: vec!["Hello there.".into()],
            reference: vec!["Hello.".into()],
        }];
        let text = write_scoring_jsonl(&records);
        assert!(
            text.contains("\"ref\":"),
            "reference side keeps its wire name"
        );
        let back = read_scoring_jsonl(&text).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].reference, records[0].reference);
    }

    #[test]
    fn scoring_jsonl_reports_bad_lines() {
        let err = read_scoring_jsonl("{\"doc_id\": \"a\", \"hyp\": [], \"ref\": []}\nnot json\n")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "got {err:?}");
    }

    #[test]
    fn score_table_round_trips_and_validates() {
        let text = "# comment\nsys:256\tdoc-a\t31.5\nsys:256\tdoc-b\t28.25\nsys:512\tdoc-a\t30\nsys:512\tdoc-b\t29.5\n";
        let table = read_score_table(text, "ds-bleu").unwrap();
        assert_eq!(table.metric(), "ds-bleu");
        assert_eq!(table.configs().count(), 2);
        assert_eq!(table.units("sys:256").unwrap()["doc-b"], 28.25);
        let rendered = write_score_table(&table);
        let reread = read_score_table(&rendered, "ds-bleu").unwrap();
        assert_eq!(reread.units("sys:512").unwrap()["doc-a"], 30.0);

        assert!(matches!(
            read_score_table("a\tb\n", "m"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_score_table("a\tb\tNaN\n", "m"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sentence_scores_parse() {
        let scores = read_sentence_scores("doc-a\t0\t12.5\ndoc-a\t1\t44\n").unwrap();
        assert_eq!(scores[&("doc-a".to_string(), 1)], 44.0);
    }

    #[test]
    fn position_tables_group_and_sort() {
        let mut text = String::new();
        // Rows deliberately out of position order.
        for (p, s) in [(66, 0.9), (1477, 0.1), (173, 0.8), (262, 0.7), (335, 0.6), (585, 0.5), (779, 0.3)] {
            text.push_str(&format!("sys\ts1\t{p}\t{s}\n"));
        }
        let tables = read_position_tables(&text).unwrap();
        let set = &tables["sys"];
        assert_eq!(set.sentences().len(), 1);
        assert_eq!(set.sentences()[0].positions[0], 66);
        assert_eq!(set.sentences()[0].positions[6], 1477);
        assert_eq!(set.sentences()[0].scores[6], 0.1);

        let err = read_position_tables("sys\ts1\t10\t0.5\n").unwrap_err();
        assert!(
            matches!(err, Error::IncompleteBucket { expected: 7, got: 1, .. }),
            "got {err:?}"
        );
    }

    #[test]
    fn pseudo_record_covers_span_text() {
        let origin = DocumentPair {
            doc_id: "d".into(),
            pairs: (0..4)
                .map(|i| SentencePair {
                    src: format!("s{i}"),
                    tgt: format!("t{i}"),
                    src_len: 3,
                })
                .collect(),
        };
        let span = PseudoDocument {
            doc_id: "d".into(),
            piece: 1,
            start: 2,
            end: 4,
            src_len: 6,
            budget: 8,
            flag: Some(SpanFlag::MergedTail),
        };
        let record = PseudoDocRecord::from_span(&span, &origin);
        assert_eq!(record.doc_id, "d#1");
        assert_eq!(record.src, vec!["s2", "s3"]);
        assert_eq!(record.tgt, vec!["t2", "t3"]);
        assert_eq!(record.flag.as_deref(), Some("merged_tail"));
        let jsonl = write_pseudo_jsonl(&[record]);
        let spans: Vec<PseudoDocRecord> = jsonl
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(spans[0].origin, "d");
    }
}
