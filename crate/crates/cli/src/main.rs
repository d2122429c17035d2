//! Length-aware evaluation for document-level machine translation.

use clap::{Parser, Subcommand};

mod build;
mod compare;
mod posbias;
mod positions;
mod realign;
mod repeats;
mod score;
mod util;

#[derive(Parser)]
#[command(
    name = "doceval",
    version,
    about = "Build length-controlled corpora and evaluate document-level translation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut a parallel corpus into pseudo-documents under a length budget.
    Build(build::BuildArgs),
    /// Score hypotheses with BLEU, d-BLEU, and ds-BLEU.
    Score(score::ScoreArgs),
    /// Re-segment document output against reference sentence boundaries.
    Realign(realign::RealignArgs),
    /// Paired significance tests across configs and window ladders.
    Compare(compare::CompareArgs),
    /// Positional coverage profiles of training sequences.
    Positions(positions::PositionsArgs),
    /// Repetition-degeneracy rates of translation groups.
    Repeats(repeats::RepeatsArgs),
    /// Position-bucket quality analysis.
    Posbias(posbias::PosbiasArgs),
}

fn main() -> anyhow::Result<()> {
    match &Cli::parse().command {
        Command::Build(args) => build::run(args),
        Command::Score(args) => score::run(args),
        Command::Realign(args) => realign::run(args),
        Command::Compare(args) => compare::run(args),
        Command::Positions(args) => positions::run(args),
        Command::Repeats(args) => repeats::run(args),
        Command::Posbias(args) => posbias::run(args),
    }
}
