use reqsynth::corpus::filter_corpus;
use reqsynth::evaluation::sample_tokens;
use reqsynth::generation::{generate_batch, GenerationMode, GenerationRequest, HttpTransport, LlmClient};
use reqsynth::recommender::{Recommendation, SkippedRequirement};

use super::load_corpus;
use super::recommend::{record_id, VariantSource};
use crate::error::{CliError, CliResult};
use crate::records::{read_jsonl, DraftRecord, FailureRecord, FeatureRecord, ReferenceRecord};
use crate::run::{jsonl, RunDir};
use crate::{base_config, GenerateArgs};

pub fn run(args: GenerateArgs) -> CliResult<()> {
    let mut config = base_config(&args.common)?;
    VariantSource::configure(&mut config, &args.variant);
    if !args.corpus.is_empty() {
        config.paths.corpus = args.corpus.clone();
    }
    if let Some(kind) = args.sampler {
        config.sampler.kind = kind;
    }
    if let Some(mode) = args.mode {
        config.generation.mode = mode;
    }
    if args.permissive {
        config.generation.permissive = true;
    }
    let config = config.finish()?;

    let client = match config.generation.mode {
        GenerationMode::Realizer => None,
        GenerationMode::Llm => Some(LlmClient::from_env(config.llm.clone(), Box::new(HttpTransport))?),
    };

    // Features come from a file, or are sampled from a corpus together with
    // the requirement texts as references.
    let mut references = Vec::new();
    let mut skipped = Vec::new();
    let features: Vec<(String, FeatureRecord)> = match &args.tokens {
        Some(path) => {
            let records: Vec<FeatureRecord> = read_jsonl(path)?;
            records.into_iter().enumerate().map(|(i, r)| (record_id(&r, i), r)).collect()
        }
        None => {
            let (requirements, _) = load_corpus(&config.paths.corpus)?;
            let kept = filter_corpus(requirements, &config.filter).kept;
            let sampler = config.sampler_config();
            let mut features = Vec::new();
            for req in &kept {
                match sample_tokens(req, &sampler) {
                    Ok(tokens) => {
                        features.push((req.id.clone(), FeatureRecord::from_tokens(&req.id, &tokens)));
                        references.push(ReferenceRecord { id: req.id.clone(), text: req.text.clone(), references: Vec::new() });
                    }
                    Err(reason) => skipped.push(SkippedRequirement { id: req.id.clone(), reason }),
                }
            }
            if features.is_empty() {
                return Err(CliError::input(format!("sampler {} found no usable requirement", sampler.kind)));
            }
            features
        }
    };
    let source = VariantSource::load(&config, &args.variant)?;

    let mut failures = Vec::new();
    let mut first_error: Option<CliError> = None;
    let mut accepted: Vec<(String, Recommendation)> = Vec::new();
    let mut requests = Vec::new();
    for (id, record) in &features {
        match source.recommend(record) {
            Ok(rec) => {
                requests.push(GenerationRequest {
                    variant: rec.variant.clone(),
                    tokens: record.feature_tokens().map_err(CliError::input)?,
                    mode: config.generation.mode,
                    permissive: config.generation.permissive,
                });
                accepted.push((id.clone(), rec));
            }
            Err(error) => {
                first_error.get_or_insert_with(|| CliError::input(format!("feature {id}: {error}")));
                failures.push(FailureRecord { id: id.clone(), error });
            }
        }
    }

    let mut drafts = Vec::new();
    for ((id, rec), result) in accepted.iter().zip(generate_batch(&requests, client.as_ref())) {
        match result {
            Ok(draft) => drafts.push(DraftRecord {
                id: id.clone(),
                text: draft.text,
                variant: draft.variant_ref,
                template_id: rec.variant.template_id,
                source: rec.source,
                provenance: draft.provenance,
            }),
            Err(e) => {
                failures.push(FailureRecord { id: id.clone(), error: e.to_string() });
                let e = CliError::from(e);
                first_error.get_or_insert_with(|| match e {
                    CliError::Input(m) => CliError::Input(format!("feature {id}: {m}")),
                    other => other,
                });
            }
        }
    }

    let run = RunDir::create(&config)?;
    run.write("drafts.jsonl", jsonl(&drafts))?;
    if args.tokens.is_none() {
        let records: Vec<FeatureRecord> = features.iter().map(|(_, r)| r.clone()).collect();
        run.write("features.jsonl", jsonl(&records))?;
        run.write("references.jsonl", jsonl(&references))?;
        run.write("skipped.json", serde_json::to_string_pretty(&skipped).expect("serializes"))?;
    }
    if !failures.is_empty() {
        run.write("failures.jsonl", jsonl(&failures))?;
    }
    for d in &drafts {
        println!("{}", d.text);
    }
    eprintln!("{} draft(s), {} failure(s), {} skipped", drafts.len(), failures.len(), skipped.len());
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
