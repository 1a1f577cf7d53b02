use reqsynth::recommender::{recommend, ForcedChoice, Recommendation, VariantOptions};
use reqsynth::templates::VariableTemplate;
use reqsynth::RecommenderModel;
use serde_json::json;

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};
use crate::records::{load_templates, parse_tag_list, read_jsonl, FeatureRecord};
use crate::run::{jsonl, RunDir};
use crate::{base_config, RecommendArgs, VariantFlags};

/// Templates, optional model and overrides for turning features into
/// variants.
pub struct VariantSource {
    templates: Vec<VariableTemplate>,
    model: Option<RecommenderModel>,
    forced: ForcedChoice,
    options: VariantOptions,
}

impl VariantSource {
    /// Applies the variant flags to `config`.
    pub fn configure(config: &mut PipelineConfig, flags: &VariantFlags) {
        if flags.templates.is_some() {
            config.paths.templates = flags.templates.clone();
        }
        if flags.model.is_some() {
            config.paths.model = flags.model.clone();
        }
        if flags.prune_empty_slots {
            config.variant.prune_empty_slots = true;
        }
    }

    pub fn load(config: &PipelineConfig, flags: &VariantFlags) -> CliResult<Self> {
        let templates = load_templates(config.paths.templates.as_deref())?;
        let model = match &config.paths.model {
            Some(path) => Some(RecommenderModel::load(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?),
            None => {
                eprintln!("notice: no model given; using the rule-based fallback");
                None
            }
        };
        let forced = ForcedChoice {
            template_id: flags.template,
            tags: flags.force_tags.as_deref().map(parse_tag_list).transpose()?,
        };
        if let Some(id) = forced.template_id {
            if !templates.iter().any(|t| t.id == id) {
                return Err(CliError::input(format!("unknown template id {id}")));
            }
        }
        let options = VariantOptions { prune_empty_slots: config.variant.prune_empty_slots, ..Default::default() };
        Ok(VariantSource { templates, model, forced, options })
    }

    /// Flags take precedence over a record's own tags and template.
    pub fn recommend(&self, record: &FeatureRecord) -> Result<Recommendation, String> {
        let tokens = record.feature_tokens()?;
        let forced = ForcedChoice {
            template_id: self.forced.template_id.or(record.template_id),
            tags: self.forced.tags.clone().or_else(|| record.tags.clone()),
        };
        recommend(&self.templates, self.model.as_ref(), &tokens, &forced, &self.options).map_err(|e| e.to_string())
    }
}

/// Id of the record at `index`: its own, else its 1-based line ordinal.
pub fn record_id(record: &FeatureRecord, index: usize) -> String {
    record.id.clone().unwrap_or_else(|| (index + 1).to_string())
}

pub fn run(args: RecommendArgs) -> CliResult<()> {
    let mut config = base_config(&args.common)?;
    VariantSource::configure(&mut config, &args.variant);
    let config = config.finish()?;
    let records: Vec<FeatureRecord> = read_jsonl(&args.tokens)?;
    let source = VariantSource::load(&config, &args.variant)?;

    let mut lines = Vec::with_capacity(records.len());
    let mut out = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let id = record_id(record, i);
        let rec = source.recommend(record).map_err(|e| CliError::input(format!("feature {id}: {e}")))?;
        lines.push(rec.variant.rendered.clone());
        out.push(json!({
            "id": id,
            "source": rec.source,
            "template_id": rec.variant.template_id,
            "tags": rec.tags,
            "probabilities": rec.probabilities,
            "variant": rec.variant.rendered,
            "slots": rec.variant.slots,
        }));
    }
    let run = RunDir::create(&config)?;
    run.write("recommendations.jsonl", jsonl(&out))?;
    for line in lines {
        println!("{line}");
    }
    Ok(())
}
