use reqsynth::corpus::{extract_tag_sequence, filter_corpus};
use reqsynth::templates::{induce_templates_with, render_templates, TagInventory};
use serde_json::json;

use super::load_corpus;
use crate::error::{CliError, CliResult};
use crate::run::RunDir;
use crate::{base_config, InduceArgs};

pub fn run(args: InduceArgs) -> CliResult<()> {
    let mut config = base_config(&args.common)?;
    if !args.corpus.is_empty() {
        config.paths.corpus = args.corpus;
    }
    if let Some(m) = args.min_support {
        config.induce.min_support = m;
    }
    let config = config.finish()?;

    let (requirements, rejected) = load_corpus(&config.paths.corpus)?;
    let outcome = filter_corpus(requirements, &config.filter);
    if outcome.kept.is_empty() {
        return Err(CliError::input(format!("all {} requirement(s) were filtered out", outcome.dropped.len())));
    }
    let sequences = outcome
        .kept
        .iter()
        .map(extract_tag_sequence)
        .collect::<Result<Vec<_>, _>>()?;
    let report = induce_templates_with(&sequences, config.induce.min_support, &TagInventory::default())?;

    let run = RunDir::create(&config)?;
    let templates = render_templates(&report.templates);
    run.write("templates.txt", &templates)?;
    run.write("induction.json", report.to_json())?;
    let dropped = json!({ "rejected": rejected, "filtered": outcome.dropped });
    run.write("dropped.json", serde_json::to_string_pretty(&dropped).expect("serializes"))?;

    print!("{templates}");
    eprintln!(
        "{} template(s); {}/{} sequence(s) covered; {} filtered, {} rejected",
        report.templates.len(),
        report.covered,
        report.total,
        outcome.dropped.len(),
        rejected.len()
    );
    Ok(())
}
