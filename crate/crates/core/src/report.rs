//! Rendering comparisons and profiles into small text tables.
//!
//! Cell conventions, shared by every report:
//! - `-` — no significant difference (p > 0.05);
//! - trailing `*` — marginal (0.01 < p <= 0.05);
//! - plain value — significant at the 1% level;
//! - `**bold**` — the companion metric disagrees about significance.

use std::collections::BTreeMap;

use crate::positions::CoverageProfile;
use crate::stats::{AdjacentComparison, PairedTestResult, SignificanceTier, SystemComparison};

/// Corpus score with its brevity penalty, e.g. `31.5 (0.98)`.
pub fn score_cell(score: f64, brevity_penalty: f64) -> String {
    format!("{score:.1} ({brevity_penalty:.2})")
}

/// Window-ladder cell: the mean paired score difference, suppressed when the
/// change is not significant.
pub fn adjacent_cell(result: &PairedTestResult) -> String {
    match result.tier {
        SignificanceTier::NotSignificant => "-".to_string(),
        SignificanceTier::Marginal => format!("{:.1}*", result.mean_diff),
        SignificanceTier::Significant => format!("{:.1}", result.mean_diff),
    }
}

/// Head-to-head cell: mean difference with the p-value, bolded when the
/// companion metric disagrees about significance.
pub fn system_cell(result: &PairedTestResult, disagrees: bool) -> String {
    let body = if result.tier == SignificanceTier::NotSignificant {
        "-".to_string()
    } else {
        format!("{:.1} ({:.2})", result.mean_diff, result.p_value)
    };
    if disagrees {
        format!("**{body}**")
    } else {
        body
    }
}

/// A labelled table rendered to TSV or CSV. Cells are plain strings; the
/// writers only handle delimiting.
#[derive(Clone, Debug)]
pub struct Grid {
    corner: String,
    columns: Vec<String>,
    rows: Vec<(String, Vec<String>)>,
}

impl Grid {
    pub fn new(corner: impl Into<String>, columns: Vec<String>) -> Self {
        Grid {
            corner: corner.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, label: impl Into<String>, cells: Vec<String>) {
        let label = label.into();
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row {label:?} must fill every column"
        );
        self.rows.push((label, cells));
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.corner);
        for col in &self.columns {
            out.push('\t');
            out.push_str(col);
        }
        out.push('\n');
        for (label, cells) in &self.rows {
            out.push_str(label);
            for cell in cells {
                debug_assert!(!cell.contains('\t'), "cells must be tab-free");
                out.push('\t');
                out.push_str(cell);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut write_row = |label: &str, cells: &[String]| {
            out.push_str(&csv_field(label));
            for cell in cells {
                out.push(',');
                out.push_str(&csv_field(cell));
            }
            out.push('\n');
        };
        write_row(&self.corner, &self.columns);
        for (label, cells) in &self.rows {
            write_row(label, cells);
        }
        out
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Lays out adjacent-window comparisons: one row per system, one column per
/// ladder step. Column order follows the comparisons' first appearance,
/// which [`compare_adjacent_windows`](crate::stats::compare_adjacent_windows)
/// emits in ladder order.
pub fn adjacent_grid(comparisons: &[AdjacentComparison]) -> Grid {
    let mut columns: Vec<String> = Vec::new();
    for c in comparisons {
        if !columns.contains(&c.label()) {
            columns.push(c.label());
        }
    }
    let mut by_system: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for c in comparisons {
        by_system
            .entry(c.system.clone())
            .or_default()
            .insert(c.label(), adjacent_cell(&c.result));
    }
    let mut grid = Grid::new("system", columns.clone());
    for (system, cells) in by_system {
        let row = columns
            .iter()
            .map(|col| cells.get(col).cloned().unwrap_or_else(|| "-".to_string()))
            .collect();
        grid.push_row(system, row);
    }
    grid
}

/// Lays out head-to-head comparisons under two metrics side by side, marking
/// cells where the metrics disagree about significance.
pub fn system_grid(
    metric_names: (&str, &str),
    primary: &[SystemComparison],
    companion: &[SystemComparison],
) -> Grid {
    assert_eq!(
        primary.len(),
        companion.len(),
        "both metrics must cover the same comparison list"
    );
    let mut grid = Grid::new(
        "comparison",
        vec![metric_names.0.to_string(), metric_names.1.to_string()],
    );
    for (a, b) in primary.iter().zip(companion) {
        assert_eq!(
            (&a.left, &a.right),
            (&b.left, &b.right),
            "comparison lists must align pairwise"
        );
        let disagrees = crate::stats::metrics_disagree(&a.result, &b.result);
        grid.push_row(
            format!("{} vs {}", a.left, a.right),
            vec![
                system_cell(&a.result, disagrees),
                system_cell(&b.result, disagrees),
            ],
        );
    }
    grid
}

/// Coverage profiles as CSV: a 1-based position column followed by one
/// column per sampler. Probabilities keep their shortest exact decimal form.
pub fn coverage_csv(profiles: &[(String, &CoverageProfile)]) -> String {
    assert!(!profiles.is_empty(), "need at least one profile");
    let len = profiles[0].1.values().len();
    assert!(
        profiles.iter().all(|(_, p)| p.values().len() == len),
        "profiles must share a model maximum"
    );
    let mut out = String::from("position");
    for (name, _) in profiles {
        out.push(',');
        out.push_str(&csv_field(name));
    }
    out.push('\n');
    for i in 0..len {
        out.push_str(&(i + 1).to_string());
        for (_, profile) in profiles {
            out.push(',');
            out.push_str(&profile.values()[i].to_string());
        }
        out.push('\n');
    }
    out
}
