//! `doceval positions` — positional coverage of training sequences.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use doceval::formats::{parse_corpus_text, sentence_id};
use doceval::positions::{coverage_profile, flatness, CoverageProfile, OffsetSampler};
use doceval::report::coverage_csv;
use doceval::tokenizer::sentence_length;
use serde_json::{json, Value};

use crate::util::{self, OutDir};

#[derive(Args)]
pub struct PositionsArgs {
    /// Sequences to profile: marker text where each document is one training
    /// sequence.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Sequence length measurement: 13a, ws, or external:FILE.
    #[arg(long, default_value = "13a")]
    pub scheme: String,
    /// Model maximum sequence length.
    #[arg(long = "l-max")]
    pub l_max: usize,
    /// Also profile the shifted sampler with its shift capped here.
    #[arg(long)]
    pub max_offset: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn run(args: &PositionsArgs) -> Result<()> {
    let scheme = util::parse_scheme(&args.scheme)?;
    let docs = parse_corpus_text(&util::read_text(&args.corpus)?)?;
    let mut lengths = Vec::with_capacity(docs.len());
    for doc in &docs {
        let mut total = 0;
        for (i, sentence) in doc.sentences.iter().enumerate() {
            total += sentence_length(sentence, &scheme, &sentence_id(&doc.doc_id, i))?;
        }
        lengths.push(total);
    }

    let mut samplers = vec![
        ("baseline".to_string(), OffsetSampler::Baseline),
        ("shape".to_string(), OffsetSampler::Shape),
        ("unifpe".to_string(), OffsetSampler::UnifPe),
    ];
    if let Some(cap) = args.max_offset {
        samplers.push((
            "shape_capped".to_string(),
            OffsetSampler::ShapeCapped { max_offset: cap },
        ));
    }

    let profiles: Vec<(String, CoverageProfile)> = samplers
        .iter()
        .map(|(name, sampler)| {
            Ok((
                name.clone(),
                coverage_profile(&lengths, *sampler, args.l_max)?,
            ))
        })
        .collect::<Result<_>>()?;

    let borrowed: Vec<(String, &CoverageProfile)> = profiles
        .iter()
        .map(|(name, p)| (name.clone(), p))
        .collect();
    let mut flat_tsv = String::from("sampler\ttotal_mass\tflatness\n");
    let mut flat_json = Vec::new();
    for (name, profile) in &profiles {
        let f = flatness(profile, 1..=args.l_max);
        flat_tsv.push_str(&format!("{name}\t{}\t{}\n", profile.total_mass(), f));
        flat_json.push(json!({
            "sampler": name,
            "total_mass": profile.total_mass(),
            "flatness": f,
        }));
    }

    let out = OutDir::create(&args.out)?;
    out.write("coverage.csv", &coverage_csv(&borrowed))?;
    out.write("flatness.tsv", &flat_tsv)?;
    out.write_json(
        "report.json",
        &json!({
            "sequences": lengths.len(),
            "model_max": args.l_max,
            "samplers": Value::Array(flat_json),
        }),
    )?;
    out.write_metadata(
        "positions",
        json!({
            "corpus": args.corpus,
            "scheme": scheme.name(),
            "l_max": args.l_max,
            "max_offset": args.max_offset,
            "flatness": "population std over mean of the coverage profile",
        }),
    )?;
    Ok(())
}
