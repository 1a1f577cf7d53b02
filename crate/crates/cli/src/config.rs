//! Pipeline configuration: defaults, overlaid by a TOML file, overlaid by
//! command-line flags.

use std::path::{Path, PathBuf};

use reqsynth::corpus::FilterPolicy;
use reqsynth::evaluation::{MetricParams, SamplerConfig, SamplerKind};
use reqsynth::generation::{GenerationMode, LlmConfig};
use reqsynth::recommender::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Drives sampling, training, reverse engineering and fold splits.
    pub seed: u64,
    pub paths: Paths,
    pub filter: FilterPolicy,
    pub induce: InduceSettings,
    pub sampler: SamplerSettings,
    pub train: TrainConfig,
    pub variant: VariantSettings,
    pub generation: GenerationSettings,
    pub llm: LlmConfig,
    pub metrics: MetricParams,
    pub evaluate: EvaluateSettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            paths: Paths::default(),
            filter: FilterPolicy::default(),
            induce: InduceSettings::default(),
            sampler: SamplerSettings::default(),
            train: TrainConfig::default(),
            variant: VariantSettings::default(),
            generation: GenerationSettings::default(),
            llm: LlmConfig::default(),
            metrics: MetricParams::default(),
            evaluate: EvaluateSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Vec<PathBuf>,
    pub templates: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths { corpus: Vec::new(), templates: None, model: None, out: PathBuf::from("runs") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InduceSettings {
    pub min_support: usize,
}

impl Default for InduceSettings {
    fn default() -> Self {
        InduceSettings { min_support: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSettings {
    pub kind: SamplerKind,
    pub min_tokens: usize,
    pub max_tokens: usize,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings { kind: SamplerKind::T1, min_tokens: 3, max_tokens: 5 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantSettings {
    pub prune_empty_slots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationSettings {
    pub mode: GenerationMode,
    pub permissive: bool,
}

impl Default for GenerationSettings {
    fn default() -> Self {
        GenerationSettings { mode: GenerationMode::Realizer, permissive: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSettings {
    pub k: Option<usize>,
}

impl PipelineConfig {
    /// Defaults, or the file at `path` over the defaults.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(PipelineConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Settles values derived from others and validates the result.
    pub fn finish(mut self) -> CliResult<Self> {
        self.train.seed = self.seed;
        self.sampler_config().validate().map_err(CliError::config)?;
        if self.induce.min_support == 0 {
            return Err(CliError::config("induce.min_support must be at least 1"));
        }
        if self.evaluate.k.is_some_and(|k| k < 2) {
            return Err(CliError::config("evaluate.k must be at least 2"));
        }
        Ok(self)
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            kind: self.sampler.kind,
            min_tokens: self.sampler.min_tokens,
            max_tokens: self.sampler.max_tokens,
            seed: self.seed,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
