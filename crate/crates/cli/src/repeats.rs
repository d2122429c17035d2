//! `doceval repeats` — degenerate repetition in translation output.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use doceval::formats::parse_corpus_text;
use doceval::repetition::{repetition_rates, RepeatUnit, TranslationGroups, DEFAULT_REPEAT_LEN};
use serde_json::json;

use crate::util::{self, OutDir};

#[derive(Args)]
pub struct RepeatsArgs {
    /// Translation group "system:window=FILE"; repeatable.
    #[arg(long = "group", required = true)]
    pub groups: Vec<String>,
    /// Window size: a translation is flagged when some window of this many
    /// consecutive units appears more than once.
    #[arg(long = "run-len", default_value_t = DEFAULT_REPEAT_LEN)]
    pub run_len: usize,
    #[arg(long, value_enum, default_value_t = UnitArg::Token)]
    pub unit: UnitArg,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    /// Runs of identical scoring tokens.
    Token,
    /// Runs of identical characters in the raw text.
    Char,
}

pub fn run(args: &RepeatsArgs) -> Result<()> {
    let mut groups = TranslationGroups::new();
    for spec in &args.groups {
        let (key, path) = spec
            .split_once('=')
            .with_context(|| format!("bad --group {spec:?}; expected system:window=FILE"))?;
        let (system, window) = key
            .rsplit_once(':')
            .with_context(|| format!("bad group key {key:?}; expected system:window"))?;
        let docs = parse_corpus_text(&util::read_text(Path::new(path))?)
            .with_context(|| format!("parsing {path}"))?;
        let entry = groups
            .entry((system.to_string(), window.to_string()))
            .or_default();
        for doc in docs {
            entry.push((doc.doc_id, doc.sentences.join(" ")));
        }
    }

    let unit = match args.unit {
        UnitArg::Token => RepeatUnit::Token,
        UnitArg::Char => RepeatUnit::Char,
    };
    let reports = repetition_rates(&groups, args.run_len, unit)?;

    let mut rates = String::from("system\twindow\tflagged\ttotal\trate\n");
    let mut flagged = String::from("# system\twindow\tdoc_id\n");
    let mut blocks = Vec::new();
    for ((system, window), report) in &reports {
        rates.push_str(&format!(
            "{system}\t{window}\t{}\t{}\t{}\n",
            report.flagged,
            report.total,
            report.rate()
        ));
        for (doc_id, is_flagged) in &report.per_document {
            if *is_flagged {
                flagged.push_str(&format!("{system}\t{window}\t{doc_id}\n"));
            }
        }
        blocks.push(json!({
            "system": system,
            "window": window,
            "flagged": report.flagged,
            "total": report.total,
            "rate": report.rate(),
        }));
    }

    let out = OutDir::create(&args.out)?;
    out.write("rates.tsv", &rates)?;
    out.write("flagged.tsv", &flagged)?;
    out.write_json("report.json", &json!({"run_len": args.run_len, "groups": blocks}))?;
    out.write_metadata(
        "repeats",
        json!({
            "groups": args.groups,
            "run_len": args.run_len,
            "unit": format!("{:?}", args.unit).to_lowercase(),
            "rule": "flag a translation in which some window of run_len consecutive units occurs more than once",
        }),
    )?;
    Ok(())
}
