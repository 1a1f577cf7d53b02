//! Key2Temp-lite: template selection, per-token tag prediction and variant
//! construction for a feature's (token, ISO role) list.
//!
//! Token lists are embedded with hashed lexical features. Template selection
//! projects the instance vector and compares it by cosine similarity with a
//! learned embedding per template; tag prediction scores each token against
//! eight per-tag weight vectors. [`fallback_recommend`] provides a rule-based
//! path for use without a trained model.

mod fallback;
mod features;
mod instances;
mod model;
mod train;
mod variant;

pub use fallback::{constraint_tag, fallback_recommend, fallback_tags, iso_role_for};
pub use features::{featurize, featurize_sparse, SparseFeatures};
pub use instances::{
    read_instances, reverse_engineer_training_set, write_instances, ReverseEngineering, SkippedRequirement,
    TrainingInstance,
};
pub use model::{Projection, RecommenderModel, TemplateSelection, MODEL_VERSION};
pub use train::{
    task1_accuracy, task1_loss, task2_accuracy, task2_loss, train, EpochLosses, TrainConfig, TrainOutcome,
};
pub use variant::{construct_variant, TemplateVariant, VariantOptions, VariantSlot, VariantSlotKind};

use serde::{Deserialize, Serialize};

use crate::corpus::{IsoRole, SrlTag};
use crate::templates::VariableTemplate;

#[derive(Debug, thiserror::Error)]
pub enum RecommenderError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("token `{token}` tagged {tag} fits no slot of template {template_id}")]
    UnplaceableToken { token: String, tag: String, template_id: u32 },
    #[error("model file has version `{found}`, expected `{expected}`")]
    VersionMismatch { found: String, expected: String },
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("line {line}: {message}")]
    Jsonl { line: usize, message: String },
    #[error("non-finite {task} loss at epoch {epoch}")]
    NonFiniteLoss { task: &'static str, epoch: usize },
    #[error("unknown template id {0}")]
    UnknownTemplate(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A feature keyword with its ISO syntactic role and its ordinal within the
/// feature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureToken {
    pub text: String,
    pub role: IsoRole,
    pub position: usize,
}

impl FeatureToken {
    /// Trims `text`; fails when nothing is left.
    pub fn new(text: &str, role: IsoRole, position: usize) -> Result<Self, RecommenderError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(RecommenderError::InvalidArgument(format!("token at position {position} is empty")));
        }
        Ok(FeatureToken { text: text.to_string(), role, position })
    }

    /// Builds a positioned token list from (text, role) pairs.
    pub fn list<'a>(pairs: impl IntoIterator<Item = (&'a str, IsoRole)>) -> Result<Vec<Self>, RecommenderError> {
        pairs
            .into_iter()
            .enumerate()
            .map(|(i, (text, role))| FeatureToken::new(text, role, i))
            .collect()
    }
}

/// Where a recommendation's template and tags came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecommendationSource {
    Model,
    Fallback,
}

/// Caller overrides for [`recommend`].
#[derive(Debug, Clone, Default)]
pub struct ForcedChoice {
    pub template_id: Option<u32>,
    pub tags: Option<Vec<SrlTag>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Recommendation {
    pub source: RecommendationSource,
    /// Template probabilities from the model, highest first. Empty on the
    /// fallback path.
    pub probabilities: Vec<(u32, f64)>,
    pub tags: Vec<SrlTag>,
    pub variant: TemplateVariant,
}

/// Full inference: choose a template, tag the tokens and build the variant.
///
/// Candidate templates are tried in preference order (model probability, or
/// the fallback choice followed by the remaining ids ascending) until one
/// accepts the tags; the first construction error is returned when none does.
/// Forced tags and a forced template override the corresponding choice.
pub fn recommend(
    templates: &[VariableTemplate],
    model: Option<&RecommenderModel>,
    tokens: &[FeatureToken],
    forced: &ForcedChoice,
    options: &VariantOptions,
) -> Result<Recommendation, RecommenderError> {
    if tokens.is_empty() {
        return Err(RecommenderError::InvalidArgument("feature has no tokens".into()));
    }
    if let Some(tags) = &forced.tags {
        if tags.len() != tokens.len() {
            return Err(RecommenderError::InvalidArgument(format!(
                "{} forced tag(s) for {} token(s)",
                tags.len(),
                tokens.len()
            )));
        }
    }
    let (source, probabilities, model_tags) = match model {
        Some(m) => {
            let selection = m.select_template(tokens)?;
            (RecommendationSource::Model, selection.ranked(), Some(m.predict_tags(tokens)?))
        }
        None => (RecommendationSource::Fallback, Vec::new(), None),
    };

    let mut order: Vec<u32> = match (forced.template_id, source) {
        (Some(id), _) => vec![id],
        (None, RecommendationSource::Model) => probabilities.iter().map(|&(id, _)| id).collect(),
        (None, RecommendationSource::Fallback) => {
            let first = fallback_recommend(tokens).0;
            let mut ids = vec![first];
            let mut rest: Vec<u32> = templates.iter().map(|t| t.id).filter(|&id| id != first).collect();
            rest.sort_unstable();
            ids.extend(rest);
            ids
        }
    };
    if forced.template_id.is_none() {
        order.retain(|id| templates.iter().any(|t| t.id == *id));
    }

    let mut first_error = None;
    for id in order {
        let template = templates.iter().find(|t| t.id == id).ok_or(RecommenderError::UnknownTemplate(id))?;
        let tags = match (&forced.tags, &model_tags) {
            (Some(t), _) => t.clone(),
            (None, Some(t)) => t.clone(),
            (None, None) => fallback_tags(tokens, id),
        };
        match construct_variant(template, tokens, &tags, options) {
            Ok(variant) => {
                return Ok(Recommendation { source, probabilities, tags, variant });
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    Err(first_error.unwrap_or_else(|| RecommenderError::InvalidArgument("no templates available".into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLIGHT_PLAN: &str = "[Arg2][Arg0]Flight plan[Arg0][shall][V][Arg1][ArgM-BNF]UAV[ArgM-BNF]";

    fn flight_plan_tokens() -> Vec<FeatureToken> {
        FeatureToken::list([("Flight plan", IsoRole::Subject), ("UAV", IsoRole::Constraint)]).unwrap()
    }

    #[test]
    fn token_text_is_trimmed_and_required() {
        assert_eq!(FeatureToken::new("  UAV ", IsoRole::Constraint, 0).unwrap().text, "UAV");
        assert!(FeatureToken::new("   ", IsoRole::Constraint, 0).is_err());
    }

    #[test]
    fn forced_tags_without_template_reach_template_one() {
        let templates = VariableTemplate::reference_pair();
        let forced = ForcedChoice { template_id: None, tags: Some(vec![SrlTag::Arg0, SrlTag::ArgmBnf]) };
        let rec = recommend(&templates, None, &flight_plan_tokens(), &forced, &VariantOptions::default()).unwrap();
        assert_eq!(rec.variant.template_id, 1);
        assert_eq!(rec.variant.rendered, FLIGHT_PLAN);
    }

    #[test]
    fn fallback_path_without_model() {
        let templates = VariableTemplate::reference_pair();
        let tokens = FeatureToken::list([
            ("The system", IsoRole::Subject),
            ("display", IsoRole::Action),
            ("alarm status", IsoRole::Object),
        ])
        .unwrap();
        let rec = recommend(&templates, None, &tokens, &ForcedChoice::default(), &VariantOptions::default()).unwrap();
        assert_eq!(rec.source, RecommendationSource::Fallback);
        assert_eq!(
            rec.variant.rendered,
            "[Arg2][Arg0]The system[Arg0][shall][V]display[V][Arg1]alarm status[Arg1][variable part]"
        );
    }

    #[test]
    fn unplaceable_tags_report_the_first_error() {
        let templates = VariableTemplate::reference_pair();
        let forced = ForcedChoice { template_id: Some(2), tags: Some(vec![SrlTag::Arg0, SrlTag::ArgmBnf]) };
        let err = recommend(&templates, None, &flight_plan_tokens(), &forced, &VariantOptions::default()).unwrap_err();
        assert!(err.to_string().contains("Flight plan"), "{err}");
    }

    #[test]
    fn tag_count_must_match() {
        let templates = VariableTemplate::reference_pair();
        let forced = ForcedChoice { template_id: None, tags: Some(vec![SrlTag::Arg0]) };
        assert!(recommend(&templates, None, &flight_plan_tokens(), &forced, &VariantOptions::default()).is_err());
    }
}
