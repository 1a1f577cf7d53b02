//! Draft generation from template variants.
//!
//! [`realize`] is a deterministic offline renderer. In LLM mode the variant
//! and role-numbered tokens are injected into a prompt and posted to a
//! completion endpoint through an [`LlmClient`].

mod llm;
mod prompt;
mod realize;

pub use llm::{parse_completion, CompletionTransport, HttpTransport, LlmClient, LlmConfig, TransportFailure};
pub use prompt::build_prompt;
pub use realize::{realize, PLACEHOLDER};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::split_sentences;
use crate::recommender::{FeatureToken, TemplateVariant};

#[derive(Debug, thiserror::Error)]
pub enum GenerationError {
    #[error("unbound mandatory slot(s): {}", .0.join(", "))]
    UnboundSlots(Vec<String>),
    #[error("draft is empty")]
    Empty,
    #[error("draft spans more than one sentence: {0}")]
    MultiSentence(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("completion request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("invalid completion response: {0}")]
    InvalidResponse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenerationMode {
    Realizer,
    Llm,
}

impl FromStr for GenerationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "realizer" => Ok(GenerationMode::Realizer),
            "llm" => Ok(GenerationMode::Llm),
            other => Err(format!("unknown generation mode `{other}` (expected realizer or llm)")),
        }
    }
}

impl fmt::Display for GenerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenerationMode::Realizer => "realizer",
            GenerationMode::Llm => "llm",
        })
    }
}

/// How a draft was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub mode: GenerationMode,
    pub deterministic: bool,
    /// Completion attempts made; 0 for the realizer.
    pub attempts: u32,
    pub endpoint: Option<String>,
    pub model: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draft {
    pub text: String,
    pub provenance: Provenance,
    /// Rendered variant the draft was generated from.
    pub variant_ref: String,
}

#[derive(Debug, Clone)]
pub struct GenerationRequest {
    pub variant: TemplateVariant,
    pub tokens: Vec<FeatureToken>,
    pub mode: GenerationMode,
    /// Realizer only: fill unbound mandatory slots with a placeholder.
    pub permissive: bool,
}

/// Produces one draft. LLM mode needs `client`; its response is cut to the
/// first sentence.
pub fn generate(request: &GenerationRequest, client: Option<&LlmClient>) -> Result<Draft, GenerationError> {
    match request.mode {
        GenerationMode::Realizer => realize(&request.variant, request.permissive),
        GenerationMode::Llm => {
            let client = client.ok_or_else(|| GenerationError::Config("llm mode requires llm settings".into()))?;
            let prompt = build_prompt(&request.tokens, &request.variant);
            let (completion, attempts) = client.complete(&prompt)?;
            let text = split_sentences(&completion).into_iter().next().ok_or(GenerationError::Empty)?;
            Ok(Draft {
                text,
                provenance: Provenance {
                    mode: GenerationMode::Llm,
                    deterministic: false,
                    attempts,
                    endpoint: Some(client.config.endpoint.clone()),
                    model: Some(client.config.model_name.clone()),
                },
                variant_ref: request.variant.rendered.clone(),
            })
        }
    }
}

/// Generates all requests, at most `max_in_flight` of the client (or one
/// per core for the realizer) at a time. Output order equals input order.
pub fn generate_batch(
    requests: &[GenerationRequest],
    client: Option<&LlmClient>,
) -> Vec<Result<Draft, GenerationError>> {
    let threads = client.map_or(0, |c| c.config.max_in_flight);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| requests.par_iter().map(|r| generate(r, client)).collect()),
        Err(_) => requests.iter().map(|r| generate(r, client)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IsoRole, SrlTag};
    use crate::recommender::{construct_variant, VariantOptions};
    use crate::templates::VariableTemplate;

    struct Echo;

    impl CompletionTransport for Echo {
        fn post(&self, _: &LlmConfig, _: &str, body: &serde_json::Value) -> Result<String, TransportFailure> {
            let prompt = body["prompt"].as_str().unwrap();
            let first = prompt.lines().nth(1).unwrap();
            Ok(serde_json::json!({ "text": format!("About {first}. Second sentence.") }).to_string())
        }
    }

    fn request(subject: &str, mode: GenerationMode) -> GenerationRequest {
        let tokens = FeatureToken::list([(subject, IsoRole::Subject), ("log", IsoRole::Action), ("events", IsoRole::Object)])
            .unwrap();
        let variant = construct_variant(
            &VariableTemplate::reference_pair()[0],
            &tokens,
            &[SrlTag::Arg0, SrlTag::Rel, SrlTag::Arg1],
            &VariantOptions::default(),
        )
        .unwrap();
        GenerationRequest { variant, tokens, mode, permissive: false }
    }

    fn client() -> LlmClient {
        let config = LlmConfig { endpoint: "mock://echo".into(), model_name: "m".into(), ..Default::default() };
        LlmClient::new(config, "key", Box::new(Echo)).unwrap()
    }

    #[test]
    fn realizer_mode_delegates() {
        let r = request("The recorder", GenerationMode::Realizer);
        assert_eq!(generate(&r, None).unwrap(), realize(&r.variant, false).unwrap());
    }

    #[test]
    fn llm_mode_keeps_first_sentence() {
        let draft = generate(&request("The recorder", GenerationMode::Llm), Some(&client())).unwrap();
        assert_eq!(draft.text, "About The recorder, 1, log, 2, events, 3.");
        assert!(!draft.provenance.deterministic);
        assert_eq!(draft.provenance.attempts, 1);
    }

    #[test]
    fn llm_mode_without_client_is_a_config_error() {
        assert!(matches!(generate(&request("A", GenerationMode::Llm), None), Err(GenerationError::Config(_))));
    }

    #[test]
    fn batch_preserves_order() {
        let requests: Vec<_> = ["Alpha", "Beta", "Gamma", "Delta", "Epsilon"]
            .iter()
            .map(|s| request(s, GenerationMode::Llm))
            .collect();
        let drafts = generate_batch(&requests, Some(&client()));
        for (d, s) in drafts.iter().zip(["Alpha", "Beta", "Gamma", "Delta", "Epsilon"]) {
            assert!(d.as_ref().unwrap().text.starts_with(&format!("About {s},")));
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("LLM".parse::<GenerationMode>().unwrap(), GenerationMode::Llm);
        assert!("gpt".parse::<GenerationMode>().is_err());
    }
}
