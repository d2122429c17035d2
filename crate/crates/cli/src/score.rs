//! `doceval score` — BLEU at sentence and document granularity.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use doceval::metrics::{bleu, d_bleu, ds_bleu, Granularity, ScoredCorpus, ScoredDocument};
use doceval::formats::parse_corpus_text;
use doceval::report::score_cell;
use doceval::tokenizer::tokenize_scoring;
use serde_json::{json, Map, Value};

use crate::util::{self, OutDir};

#[derive(Args)]
pub struct ScoreArgs {
    /// Hypothesis corpus: `# doc <id>` markers, one segment per line.
    #[arg(long)]
    pub hyp: PathBuf,
    /// Reference corpus, aligned with --hyp document-by-document.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::All)]
    pub metric: MetricArg,
    /// Config id stamped on per-document score rows, e.g. "base:512".
    #[arg(long, default_value = "default")]
    pub config: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    /// Sentence-level corpus BLEU; needs aligned segment counts.
    Bleu,
    /// Documents concatenated, micro-aggregated.
    Dbleu,
    /// Per-document BLEU, macro-averaged.
    Dsbleu,
    /// All of the above; needs aligned segment counts.
    All,
}

pub fn run(args: &ScoreArgs) -> Result<()> {
    let hyp = parse_corpus_text(&util::read_text(&args.hyp)?)?;
    let reference = parse_corpus_text(&util::read_text(&args.reference)?)?;
    let documents: Vec<ScoredDocument> = util::zip_documents(&hyp, &reference)?
        .into_iter()
        .map(|(h, r)| ScoredDocument {
            doc_id: h.doc_id.clone(),
            hyp_segments: h.sentences.iter().map(|s| tokenize_scoring(s)).collect(),
            ref_segments: r.sentences.iter().map(|s| tokenize_scoring(s)).collect(),
        })
        .collect();
    let granularity = match args.metric {
        MetricArg::Bleu | MetricArg::All => Granularity::Sentence,
        _ => Granularity::Document,
    };
    let corpus = ScoredCorpus::new(documents, granularity)
        .context("sentence-level BLEU needs hypothesis and reference segment counts to match; use --metric dbleu or dsbleu for unaligned output")?;

    let want = |m: MetricArg| args.metric == m || args.metric == MetricArg::All;
    let mut blocks = Map::new();
    let mut tsv = String::from("metric\tscore\tdisplay\n");
    let mut score_rows = String::new();

    if want(MetricArg::Bleu) {
        let s = bleu(&corpus)?;
        tsv.push_str(&format!(
            "bleu\t{}\t{}\n",
            s.score,
            score_cell(s.score, s.brevity_penalty)
        ));
        blocks.insert("bleu".into(), serde_json::to_value(&s)?);
    }
    if want(MetricArg::Dbleu) {
        let s = d_bleu(&corpus)?;
        tsv.push_str(&format!(
            "d-bleu\t{}\t{}\n",
            s.score,
            score_cell(s.score, s.brevity_penalty)
        ));
        blocks.insert("d_bleu".into(), serde_json::to_value(&s)?);
    }
    if want(MetricArg::Dsbleu) {
        let s = ds_bleu(&corpus)?;
        tsv.push_str(&format!(
            "ds-bleu\t{}\t{:.1}\n",
            s.corpus_score, s.corpus_score
        ));
        for (doc_id, doc_score) in &s.per_document {
            score_rows.push_str(&format!("{}\t{}\t{}\n", args.config, doc_id, doc_score.score));
        }
        blocks.insert(
            "ds_bleu".into(),
            json!({
                "corpus_score": s.corpus_score,
                "per_document": s
                    .per_document
                    .iter()
                    .map(|(id, sc)| json!({"doc_id": id, "bleu": sc}))
                    .collect::<Vec<Value>>(),
            }),
        );
    }

    let out = OutDir::create(&args.out)?;
    out.write_json("report.json", &Value::Object(blocks))?;
    out.write("report.tsv", &tsv)?;
    if !score_rows.is_empty() {
        out.write("scores.tsv", &score_rows)?;
    }
    out.write_metadata(
        "score",
        json!({
            "hyp": args.hyp,
            "ref": args.reference,
            "metric": format!("{:?}", args.metric).to_lowercase(),
            "config": args.config,
            "tokenizer": "13a",
            "smoothing": "exponential",
            "ds_bleu_aggregation": "unweighted mean over documents",
        }),
    )?;
    Ok(())
}
