//! `doceval compare` — paired significance tests over score tables.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use doceval::formats::read_score_table;
use doceval::report::{adjacent_grid, system_cell, system_grid, Grid};
use doceval::stats::{compare_adjacent_windows, compare_systems, ScoreTable};
use serde_json::{json, Value};

use crate::util::{self, OutDir};

#[derive(Args)]
pub struct CompareArgs {
    /// Per-unit score tables (config_id \t unit_id \t score); several files
    /// merge into one table.
    #[arg(long, required = true, num_args = 1..)]
    pub scores: Vec<PathBuf>,
    #[arg(long, default_value = "ds-bleu")]
    pub metric: String,
    /// Window ladder, e.g. 256,512,1024: tests every adjacent step for every
    /// system appearing as "system:window".
    #[arg(long, value_delimiter = ',')]
    pub ladder: Vec<String>,
    /// Head-to-head comparison "left=right" (config ids); repeatable.
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    /// Score tables for a second metric: head-to-head cells where the two
    /// metrics disagree about significance are bolded.
    #[arg(long, num_args = 1..)]
    pub companion_scores: Vec<PathBuf>,
    #[arg(long, default_value = "companion")]
    pub companion_metric: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn merged_table(paths: &[PathBuf], metric: &str) -> Result<ScoreTable> {
    let mut merged = ScoreTable::new(metric);
    for path in paths {
        let table = read_score_table(&util::read_text(path)?, metric)
            .with_context(|| format!("parsing scores from {}", path.display()))?;
        for config in table.configs().map(str::to_string).collect::<Vec<_>>() {
            for (unit, score) in table.units(&config)? {
                merged.insert(&config, unit, *score);
            }
        }
    }
    Ok(merged)
}

pub fn run(args: &CompareArgs) -> Result<()> {
    if args.ladder.is_empty() && args.pairs.is_empty() {
        bail!("nothing to compare: pass --ladder and/or --pair");
    }
    let table = merged_table(&args.scores, &args.metric)?;
    let out = OutDir::create(&args.out)?;
    let mut report = json!({
        "metric": args.metric,
        "alpha": {"significant": 0.01, "marginal": 0.05},
    });

    if !args.ladder.is_empty() {
        ensure!(args.ladder.len() >= 2, "a ladder needs at least two windows");
        let rows = compare_adjacent_windows(&table, &args.ladder)?;
        ensure!(
            !rows.is_empty(),
            "no system covers two adjacent ladder windows (config ids must look like system:window)"
        );
        out.write("adjacent.tsv", &adjacent_grid(&rows).to_tsv())?;
        report["adjacent"] = Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "system": r.system,
                        "left_window": r.left_window,
                        "right_window": r.right_window,
                        "result": r.result,
                    })
                })
                .collect(),
        );
    }

    if !args.pairs.is_empty() {
        let pairs: Vec<(String, String)> = args
            .pairs
            .iter()
            .map(|spec| {
                spec.split_once('=')
                    .map(|(l, r)| (l.to_string(), r.to_string()))
                    .with_context(|| format!("bad --pair {spec:?}; expected left=right"))
            })
            .collect::<Result<_>>()?;
        let primary = compare_systems(&table, &pairs)?;
        let grid = if args.companion_scores.is_empty() {
            let mut grid = Grid::new("comparison", vec![args.metric.clone()]);
            for row in &primary {
                grid.push_row(
                    format!("{} vs {}", row.left, row.right),
                    vec![system_cell(&row.result, false)],
                );
            }
            grid
        } else {
            let companion_table = merged_table(&args.companion_scores, &args.companion_metric)?;
            let companion = compare_systems(&companion_table, &pairs)?;
            report["companion"] = json!({
                "metric": args.companion_metric,
                "pairs": companion.iter().map(|r| serde_json::to_value(r).unwrap()).collect::<Vec<_>>(),
            });
            system_grid(
                (args.metric.as_str(), args.companion_metric.as_str()),
                &primary,
                &companion,
            )
        };
        out.write("systems.tsv", &grid.to_tsv())?;
        report["pairs"] = serde_json::to_value(&primary)?;
    }

    out.write_json("report.json", &report)?;
    out.write_metadata(
        "compare",
        json!({
            "scores": args.scores,
            "metric": args.metric,
            "ladder": args.ladder,
            "pairs": args.pairs,
            "companion_scores": args.companion_scores,
            "test": "two-sided paired Student t",
        }),
    )?;
    Ok(())
}
