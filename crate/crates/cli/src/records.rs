//! Line-oriented JSON records exchanged between commands.

use std::path::Path;

use reqsynth::generation::Provenance;
use reqsynth::recommender::RecommendationSource;
use reqsynth::templates::{parse_templates, VariableTemplate};
use reqsynth::{FeatureToken, IsoRole, SrlTag};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::run::read_text;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenRecord {
    pub text: String,
    pub role: IsoRole,
}

/// One feature: tokens plus optional forced tags and template. Training
/// instance lines are valid feature records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub tokens: Vec<TokenRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<Vec<SrlTag>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_id: Option<u32>,
}

impl FeatureRecord {
    pub fn from_tokens(id: &str, tokens: &[FeatureToken]) -> Self {
        FeatureRecord {
            id: Some(id.to_string()),
            tokens: tokens.iter().map(|t| TokenRecord { text: t.text.clone(), role: t.role }).collect(),
            tags: None,
            template_id: None,
        }
    }

    pub fn feature_tokens(&self) -> Result<Vec<FeatureToken>, String> {
        if self.tokens.is_empty() {
            return Err("feature has no tokens".into());
        }
        FeatureToken::list(self.tokens.iter().map(|t| (t.text.as_str(), t.role))).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub id: String,
    pub text: String,
    /// Additional references besides `text`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftRecord {
    pub id: String,
    pub text: String,
    pub variant: String,
    pub template_id: u32,
    pub source: RecommendationSource,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub id: String,
    pub error: String,
}

/// Candidate side of an evaluation: only `id` and `text` are read.
#[derive(Debug, Clone, Deserialize)]
pub struct SystemRecord {
    pub id: String,
    pub text: String,
}

/// Parses non-blank lines; errors carry the file and 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line)
            .map_err(|e| CliError::input(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.push(record);
    }
    if out.is_empty() {
        return Err(CliError::input(format!("{} has no records", path.display())));
    }
    Ok(out)
}

/// Templates from `path`, or the two reference templates.
pub fn load_templates(path: Option<&Path>) -> CliResult<Vec<VariableTemplate>> {
    match path {
        Some(p) => {
            let templates = parse_templates(&read_text(p)?)?;
            if templates.is_empty() {
                return Err(CliError::input(format!("{} defines no template", p.display())));
            }
            Ok(templates)
        }
        None => Ok(VariableTemplate::reference_pair().to_vec()),
    }
}

/// Comma-separated PropBank labels, e.g. `ARG0,ARGM-BNF`.
pub fn parse_tag_list(list: &str) -> CliResult<Vec<SrlTag>> {
    let tags: Vec<SrlTag> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(SrlTag::parse).collect();
    if let Some(bad) = tags.iter().find(|t| t.is_other()) {
        return Err(CliError::input(format!("`{}` is not one of the eight scored tags", bad.propbank())));
    }
    Ok(tags)
}
