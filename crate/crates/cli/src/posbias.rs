//! `doceval posbias` — does quality decay along the sequence position?

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use doceval::formats::read_position_tables;
use doceval::report::adjacent_cell;
use doceval::stats::position_bias_analysis;
use serde_json::json;

use crate::util::{self, OutDir};

#[derive(Args)]
pub struct PosbiasArgs {
    /// Long-format bucket scores: system \t sentence_id \t position \t score,
    /// exactly seven rows per (system, sentence).
    #[arg(long)]
    pub table: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn run(args: &PosbiasArgs) -> Result<()> {
    let tables = read_position_tables(&util::read_text(&args.table)?)?;

    let mut tsv = String::from("system\tbuckets\tmean_diff\tt_stat\tp_value\ttier\tcell\n");
    let mut means_tsv = String::from("system\tbucket\tmean_position\n");
    let mut blocks = Vec::new();
    for (system, set) in &tables {
        let rows = position_bias_analysis(set)?;
        for (bucket, mean) in set.mean_positions().iter().enumerate() {
            means_tsv.push_str(&format!("{system}\t{bucket}\t{mean}\n"));
        }
        let mut row_json = Vec::new();
        for row in &rows {
            tsv.push_str(&format!(
                "{system}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.label(),
                row.result.mean_diff,
                util::fmt_stat(row.result.t_stat),
                util::fmt_stat(row.result.p_value),
                util::tier_name(row.result.tier),
                adjacent_cell(&row.result)
            ));
            row_json.push(json!({
                "buckets": row.label(),
                "result": row.result,
            }));
        }
        blocks.push(json!({
            "system": system,
            "sentences": set.sentences().len(),
            "rows": row_json,
        }));
    }

    let out = OutDir::create(&args.out)?;
    out.write("posbias.tsv", &tsv)?;
    out.write("bucket_means.tsv", &means_tsv)?;
    out.write_json("report.json", &json!({"systems": blocks}))?;
    out.write_metadata(
        "posbias",
        json!({
            "table": args.table,
            "test": "two-sided paired Student t on adjacent bucket score differences",
        }),
    )?;
    Ok(())
}
