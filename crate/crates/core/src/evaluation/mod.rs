//! Draft scoring (BLEU, METEOR, NIST), token-combination sampling, k-fold
//! splits and significance statistics.

mod bleu;
mod kfold;
mod meteor;
mod nist;
mod report;
mod sampling;
mod stats;
mod stemmer;

pub use bleu::{bleu_n, modified_precision};
pub use kfold::{kfold_split, Fold};
pub use meteor::{meteor, meteor_alignment, MeteorParams};
pub use nist::{nist_brevity, nist_corpus, nist_sentence, NistInfo};
pub use report::{evaluate, AggregateScores, EvalSample, MetricParams, MetricReport, RunManifest, SampleScores};
pub use sampling::{sample_tokens, SamplerConfig, SamplerKind};
pub use stats::{
    cohens_d, holm_adjust, mann_whitney_exact_p, mann_whitney_normal_p, mann_whitney_one_tailed, midranks,
    StatTestResult, EXACT_LIMIT,
};
pub use stemmer::stem;

#[derive(Debug, thiserror::Error)]
pub enum EvaluationError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("undefined: {0}")]
    Undefined(String),
}
