//! Shared I/O plumbing: atomic writes, run metadata, argument parsing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use doceval::formats::RawDocument;
use doceval::stats::SignificanceTier;
use doceval::tokenizer::{ExternalCounts, LengthScheme};
use serde::Serialize;
use serde_json::json;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes through a sibling temp file plus rename, so an interrupted run
/// never leaves a truncated output behind.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// An output directory every run product goes through.
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, content)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Every command stamps what it ran with; outputs carry no timestamps,
    /// so identical invocations produce identical bytes.
    pub fn write_metadata(&self, command: &str, config: serde_json::Value) -> Result<()> {
        self.write_json(
            "metadata.json",
            &json!({
                "tool": "doceval",
                "version": env!("CARGO_PKG_VERSION"),
                "command": command,
                "config": config,
            }),
        )
    }
}

pub fn tier_name(tier: SignificanceTier) -> &'static str {
    match tier {
        SignificanceTier::Significant => "significant",
        SignificanceTier::Marginal => "marginal",
        SignificanceTier::NotSignificant => "not_significant",
    }
}

/// Statistic formatting for TSV cells: plain decimal in the readable range,
/// scientific otherwise (f64's Display would spell 1e-64 out in full).
pub fn fmt_stat(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (x.abs() >= 1e-4 && x.abs() < 1e15) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Length schemes on the command line: `13a`, `ws`, or `external:FILE`
/// where FILE holds `sentence_id \t count` rows.
pub fn parse_scheme(arg: &str) -> Result<LengthScheme> {
    match arg {
        "13a" => Ok(LengthScheme::ScoringTokens),
        "ws" => Ok(LengthScheme::Whitespace),
        other => match other.strip_prefix("external:") {
            Some(path) => {
                let counts = ExternalCounts::from_tsv(&read_text(Path::new(path))?)
                    .with_context(|| format!("parsing length counts from {path}"))?;
                Ok(LengthScheme::External(counts))
            }
            None => bail!("unknown length scheme {other:?}; use 13a, ws, or external:FILE"),
        },
    }
}

/// Pairs two corpora document-by-document; ids must match in order.
pub fn zip_documents<'a>(
    hyp: &'a [RawDocument],
    reference: &'a [RawDocument],
) -> Result<Vec<(&'a RawDocument, &'a RawDocument)>> {
    ensure!(
        hyp.len() == reference.len(),
        "hypothesis has {} documents but reference has {}",
        hyp.len(),
        reference.len()
    );
    for (i, (h, r)) in hyp.iter().zip(reference).enumerate() {
        ensure!(
            h.doc_id == r.doc_id,
            "document {i}: hypothesis id {:?} does not match reference id {:?}",
            h.doc_id,
            r.doc_id
        );
    }
    Ok(hyp.iter().zip(reference).collect())
}
