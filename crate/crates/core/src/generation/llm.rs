use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GenerationError;

/// Endpoint and retry settings for completion requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub seed: Option<u64>,
    pub timeout_secs: f64,
    pub max_attempts: u32,
    /// Delay before retry k (0-based) is `backoff_base_secs * 2^k` plus up
    /// to 25% jitter.
    pub backoff_base_secs: f64,
    /// Environment variable holding the bearer credential.
    pub api_key_env: String,
    pub max_in_flight: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: String::new(),
            model_name: String::new(),
            temperature: 0.0,
            max_tokens: 128,
            seed: None,
            timeout_secs: 30.0,
            max_attempts: 3,
            backoff_base_secs: 0.5,
            api_key_env: "REQSYNTH_API_KEY".to_string(),
            max_in_flight: 4,
        }
    }
}

impl LlmConfig {
    pub fn validate(&self) -> Result<(), GenerationError> {
        let bad = |m: &str| Err(GenerationError::Config(m.to_string()));
        if self.endpoint.trim().is_empty() {
            return bad("llm endpoint is not set");
        }
        if self.max_attempts == 0 {
            return bad("llm max_attempts must be at least 1");
        }
        if !(self.timeout_secs > 0.0) {
            return bad("llm timeout must be positive");
        }
        if self.max_in_flight == 0 {
            return bad("llm max_in_flight must be at least 1");
        }
        Ok(())
    }

    pub fn request_body(&self, prompt: &str) -> serde_json::Value {
        let mut body = serde_json::json!({
            "model": self.model_name,
            "prompt": prompt,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        });
        if let Some(seed) = self.seed {
            body["seed"] = seed.into();
        }
        body
    }

    fn backoff(&self, retry: u32) -> Duration {
        let base = self.backoff_base_secs * 2f64.powi(retry as i32);
        let jitter = if base > 0.0 { rand::thread_rng().gen_range(0.0..=0.25 * base) } else { 0.0 };
        Duration::from_secs_f64(base + jitter)
    }
}

/// A failed completion attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportFailure {
    /// Worth retrying: timeouts, connection errors, 429 and 5xx.
    pub transient: bool,
    pub message: String,
}

/// Sends one completion request and returns the raw response body.
pub trait CompletionTransport: Send + Sync {
    fn post(&self, config: &LlmConfig, credential: &str, body: &serde_json::Value) -> Result<String, TransportFailure>;
}

/// Blocking HTTP transport with a per-request timeout.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpTransport;

impl CompletionTransport for HttpTransport {
    fn post(&self, config: &LlmConfig, credential: &str, body: &serde_json::Value) -> Result<String, TransportFailure> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        let result = agent
            .post(&config.endpoint)
            .header("Authorization", &format!("Bearer {credential}"))
            .content_type("application/json")
            .send(body.to_string());
        let mut response = result.map_err(|e| TransportFailure {
            transient: matches!(
                e,
                ureq::Error::Io(_)
                    | ureq::Error::Timeout(_)
                    | ureq::Error::HostNotFound
                    | ureq::Error::ConnectionFailed
                    | ureq::Error::Protocol(_)
            ),
            message: e.to_string(),
        })?;
        let status = response.status().as_u16();
        let text = response.body_mut().read_to_string().map_err(|e| TransportFailure {
            transient: true,
            message: format!("reading response body: {e}"),
        })?;
        if (200..300).contains(&status) {
            Ok(text)
        } else {
            Err(TransportFailure {
                transient: status == 429 || status >= 500,
                message: format!("endpoint returned HTTP {status}"),
            })
        }
    }
}

/// A configured endpoint plus its credential and transport.
pub struct LlmClient {
    pub config: LlmConfig,
    credential: String,
    transport: Box<dyn CompletionTransport>,
}

impl LlmClient {
    pub fn new(config: LlmConfig, credential: impl Into<String>, transport: Box<dyn CompletionTransport>) -> Result<Self, GenerationError> {
        config.validate()?;
        Ok(LlmClient { config, credential: credential.into(), transport })
    }

    /// Reads the credential from the configured environment variable.
    pub fn from_env(config: LlmConfig, transport: Box<dyn CompletionTransport>) -> Result<Self, GenerationError> {
        let credential = std::env::var(&config.api_key_env)
            .ok()
            .filter(|v| !v.trim().is_empty())
            .ok_or_else(|| GenerationError::Config(format!("credential variable {} is not set", config.api_key_env)))?;
        Self::new(config, credential, transport)
    }

    /// Posts `prompt`, retrying transient failures. Returns the completion
    /// text and the number of attempts made.
    pub fn complete(&self, prompt: &str) -> Result<(String, u32), GenerationError> {
        let body = self.config.request_body(prompt);
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.transport.post(&self.config, &self.credential, &body) {
                Ok(raw) => return parse_completion(&raw).map(|text| (text, attempt)),
                Err(failure) if failure.transient && attempt < self.config.max_attempts => {
                    std::thread::sleep(self.config.backoff(attempt - 1));
                }
                Err(failure) => {
                    return Err(GenerationError::Transport { attempts: attempt, message: failure.message });
                }
            }
        }
    }
}

/// Extracts the completion text from `choices[0].text`,
/// `choices[0].message.content` or a top-level `text`.
pub fn parse_completion(raw: &str) -> Result<String, GenerationError> {
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| GenerationError::InvalidResponse(e.to_string()))?;
    let choice = value.get("choices").and_then(|c| c.get(0));
    let text = choice
        .and_then(|c| c.get("text"))
        .or_else(|| choice.and_then(|c| c.get("message")).and_then(|m| m.get("content")))
        .or_else(|| value.get("text"))
        .and_then(|t| t.as_str())
        .ok_or_else(|| GenerationError::InvalidResponse("no completion text in response".into()))?;
    Ok(text.to_string())
}
