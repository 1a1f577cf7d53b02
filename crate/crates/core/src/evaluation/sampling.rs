use std::fmt;
use std::hash::Hasher;
use std::str::FromStr;

use fnv::FnvHasher;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvaluationError;
use crate::corpus::{content_spans, AnnotatedRequirement, SrlTag};
use crate::recommender::{iso_role_for, FeatureToken};

/// Token-combination scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Subject + object + others.
    T1,
    /// Subject + predicate + others.
    T2,
    /// Random spans.
    T3,
}

impl FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "t1" => Ok(SamplerKind::T1),
            "t2" => Ok(SamplerKind::T2),
            "t3" => Ok(SamplerKind::T3),
            other => Err(format!("unknown sampler `{other}` (expected t1, t2 or t3)")),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::T1 => "t1",
            SamplerKind::T2 => "t2",
            SamplerKind::T3 => "t3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(kind: SamplerKind, seed: u64) -> Self {
        SamplerConfig { kind, min_tokens: 3, max_tokens: 5, seed }
    }

    pub fn validate(&self) -> Result<(), EvaluationError> {
        if !(3..=5).contains(&self.min_tokens) || !(self.min_tokens..=5).contains(&self.max_tokens) {
            return Err(EvaluationError::InvalidArgument(format!(
                "token bounds {}..={} must lie within 3..=5",
                self.min_tokens, self.max_tokens
            )));
        }
        Ok(())
    }
}

fn requirement_seed(seed: u64, id: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(id.as_bytes());
    seed ^ h.finish()
}

/// Samples feature tokens from a requirement's spans.
///
/// The generator is seeded from the config seed and the requirement id, so
/// a requirement's sample does not depend on its corpus neighbours. Chosen
/// spans keep sentence order; `Err` carries the skip reason.
pub fn sample_tokens(req: &AnnotatedRequirement, config: &SamplerConfig) -> Result<Vec<FeatureToken>, String> {
    config.validate().map_err(|e| e.to_string())?;
    let spans = content_spans(req);
    if spans.len() < config.min_tokens {
        return Err(format!("{} span(s), at least {} needed", spans.len(), config.min_tokens));
    }
    let rel = spans.iter().position(|s| s.tag == SrlTag::Rel);
    let before_rel = |i: usize| rel.is_some_and(|r| i < r);
    let subject = spans
        .iter()
        .position(|s| s.tag == SrlTag::Arg0)
        .or_else(|| (0..spans.len()).find(|&i| spans[i].tag == SrlTag::Arg1 && before_rel(i)));
    let object = rel.and_then(|r| (r + 1..spans.len()).find(|&i| spans[i].tag == SrlTag::Arg1));

    let required: Vec<usize> = match config.kind {
        SamplerKind::T1 => vec![
            subject.ok_or("no subject span")?,
            object.ok_or("no object span")?,
        ],
        SamplerKind::T2 => vec![subject.ok_or("no subject span")?, rel.ok_or("no predicate span")?],
        SamplerKind::T3 => Vec::new(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(requirement_seed(config.seed, &req.id));
    let count = rng.gen_range(config.min_tokens..=config.max_tokens.min(spans.len()));
    let mut others: Vec<usize> = (0..spans.len()).filter(|i| !required.contains(i)).collect();
    others.shuffle(&mut rng);
    let mut chosen = required;
    chosen.extend(others.into_iter().take(count - chosen.len()));
    chosen.sort_unstable();

    let leading_condition = spans[0].tag == SrlTag::Arg2;
    chosen
        .iter()
        .enumerate()
        .map(|(position, &i)| {
            let span = spans[i];
            let role = iso_role_for(&span.tag, i == 0 && leading_condition, before_rel(i));
            FeatureToken::new(&req.span_text(span), role, position).map_err(|e| e.to_string())
        })
        .collect()
}
