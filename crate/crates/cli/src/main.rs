//! `reqsynth`: template induction, recommender training, variant
//! recommendation, draft generation and evaluation.

mod commands;
mod config;
mod error;
mod records;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reqsynth::evaluation::SamplerKind;
use reqsynth::generation::GenerationMode;

use config::PipelineConfig;
use error::CliResult;

#[derive(Parser)]
#[command(name = "reqsynth", version, about = "Functional-requirement draft synthesis from feature keywords")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Induce variable SRL templates from annotated requirements.
    Induce(InduceArgs),
    /// Train the template recommender.
    Train(TrainArgs),
    /// Recommend a template variant for each feature.
    Recommend(RecommendArgs),
    /// Generate requirement drafts.
    Generate(GenerateArgs),
    /// Score system drafts against references.
    Evaluate(EvaluateArgs),
}

/// Flags shared by every command.
#[derive(Args, Clone)]
pub struct Common {
    /// TOML pipeline configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory that receives the run directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
pub struct InduceArgs {
    #[command(flatten)]
    common: Common,
    /// Canonical annotation JSON file; repeatable.
    #[arg(long)]
    corpus: Vec<PathBuf>,
    #[arg(long)]
    min_support: Option<usize>,
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// Training instances, one JSON object per line.
    #[arg(long, conflicts_with = "corpus")]
    instances: Option<PathBuf>,
    /// Annotated corpus to derive training instances from.
    #[arg(long)]
    corpus: Vec<PathBuf>,
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Args, Clone)]
pub struct VariantFlags {
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Trained recommender; the rule-based fallback is used without one.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Tags for every feature, e.g. `ARG0,ARGM-BNF`.
    #[arg(long)]
    force_tags: Option<String>,
    /// Template id for every feature.
    #[arg(long)]
    template: Option<u32>,
    /// Drop an unbound optional prefix and an empty variable part.
    #[arg(long)]
    prune_empty_slots: bool,
}

#[derive(Args)]
pub struct RecommendArgs {
    #[command(flatten)]
    common: Common,
    /// Features, one JSON object per line.
    #[arg(long)]
    tokens: PathBuf,
    #[command(flatten)]
    variant: VariantFlags,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    common: Common,
    /// Features, one JSON object per line.
    #[arg(long, conflicts_with = "corpus")]
    tokens: Option<PathBuf>,
    /// Annotated corpus to sample features (and references) from.
    #[arg(long)]
    corpus: Vec<PathBuf>,
    #[arg(long)]
    sampler: Option<SamplerKind>,
    #[arg(long)]
    mode: Option<GenerationMode>,
    /// Fill unbound mandatory slots with a placeholder.
    #[arg(long)]
    permissive: bool,
    #[command(flatten)]
    variant: VariantFlags,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    /// References, one `{"id", "text"}` object per line.
    #[arg(long)]
    dataset: PathBuf,
    /// System drafts as `path` or `name=path`; one or two.
    #[arg(long, required = true)]
    system: Vec<String>,
    /// Number of cross-validation folds.
    #[arg(long)]
    k: Option<usize>,
    /// Sampler that produced the drafts, recorded in the manifest.
    #[arg(long)]
    sampler: Option<SamplerKind>,
}

/// Loads the config file and applies the shared flags.
fn base_config(common: &Common) -> CliResult<PipelineConfig> {
    let mut config = PipelineConfig::load(common.config.as_deref())?;
    if let Some(out) = &common.out {
        config.paths.out = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Induce(args) => commands::induce::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Recommend(args) => commands::recommend::run(args),
        Command::Generate(args) => commands::generate::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reqsynth: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
