use std::fmt;

use reqsynth::corpus::CorpusError;
use reqsynth::evaluation::EvaluationError;
use reqsynth::generation::GenerationError;
use reqsynth::recommender::RecommenderError;
use reqsynth::templates::TemplateError;

/// A failure classified by the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1.
    Internal(String),
    /// Exit 2: unreadable or invalid inputs.
    Input(String),
    /// Exit 3: bad configuration or missing credentials.
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Input(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    pub fn input(message: impl fmt::Display) -> Self {
        CliError::Input(message.to_string())
    }

    pub fn config(message: impl fmt::Display) -> Self {
        CliError::Config(message.to_string())
    }

    pub fn internal(message: impl fmt::Display) -> Self {
        CliError::Internal(message.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Internal(m) => write!(f, "internal error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::input(e)
    }
}

impl From<TemplateError> for CliError {
    fn from(e: TemplateError) -> Self {
        CliError::input(e)
    }
}

impl From<RecommenderError> for CliError {
    fn from(e: RecommenderError) -> Self {
        match e {
            RecommenderError::NonFiniteLoss { .. } => CliError::config(e),
            RecommenderError::Io(_) => CliError::internal(e),
            _ => CliError::input(e),
        }
    }
}

impl From<GenerationError> for CliError {
    fn from(e: GenerationError) -> Self {
        match e {
            GenerationError::Config(m) => CliError::Config(m),
            GenerationError::Transport { .. } | GenerationError::InvalidResponse(_) => CliError::internal(e),
            _ => CliError::input(e),
        }
    }
}

impl From<EvaluationError> for CliError {
    fn from(e: EvaluationError) -> Self {
        CliError::input(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
