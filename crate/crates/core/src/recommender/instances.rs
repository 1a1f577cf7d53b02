use std::io::{BufRead, Write};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{iso_role_for, FeatureToken, RecommenderError};
use crate::corpus::{content_spans, extract_tag_sequence, AnnotatedRequirement, IsoRole, SrlTag};
use crate::templates::{matches, normalize_modals, TagInventory, VariableTemplate};

pub const MIN_TOKENS: usize = 2;
pub const MAX_TOKENS: usize = 5;

/// A feature with its gold template and gold tag per token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingInstance {
    pub tokens: Vec<FeatureToken>,
    pub template_id: u32,
    pub tags: Vec<SrlTag>,
}

impl TrainingInstance {
    pub fn new(tokens: Vec<FeatureToken>, template_id: u32, tags: Vec<SrlTag>) -> Result<Self, RecommenderError> {
        let inst = TrainingInstance { tokens, template_id, tags };
        inst.check().map_err(RecommenderError::InvalidArgument)?;
        Ok(inst)
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        let n = self.tokens.len();
        if !(MIN_TOKENS..=MAX_TOKENS).contains(&n) {
            return Err(format!("{n} token(s), expected {MIN_TOKENS} to {MAX_TOKENS}"));
        }
        if self.tags.len() != n {
            return Err(format!("{} tag(s) for {n} token(s)", self.tags.len()));
        }
        if let Some(tag) = self.tags.iter().find(|t| t.is_other()) {
            return Err(format!("tag `{}` is not one of the eight scored tags", tag.propbank()));
        }
        if let Some(t) = self.tokens.iter().find(|t| t.text.trim().is_empty()) {
            return Err(format!("token at position {} is empty", t.position));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonToken {
    text: String,
    role: IsoRole,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInstance {
    tokens: Vec<JsonToken>,
    template_id: u32,
    tags: Vec<SrlTag>,
}

/// Reads one instance per non-blank line. Errors carry the 1-based line
/// number.
pub fn read_instances(reader: impl BufRead) -> Result<Vec<TrainingInstance>, RecommenderError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| RecommenderError::Jsonl { line: line_no, message };
        let raw: JsonInstance = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let tokens = raw
            .tokens
            .iter()
            .enumerate()
            .map(|(p, t)| FeatureToken::new(&t.text, t.role, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| err(e.to_string()))?;
        let inst = TrainingInstance { tokens, template_id: raw.template_id, tags: raw.tags };
        inst.check().map_err(err)?;
        out.push(inst);
    }
    Ok(out)
}

pub fn write_instances(mut writer: impl Write, instances: &[TrainingInstance]) -> Result<(), RecommenderError> {
    for inst in instances {
        let raw = JsonInstance {
            tokens: inst.tokens.iter().map(|t| JsonToken { text: t.text.clone(), role: t.role }).collect(),
            template_id: inst.template_id,
            tags: inst.tags.clone(),
        };
        writeln!(writer, "{}", serde_json::to_string(&raw).expect("instance serializes"))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRequirement {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ReverseEngineering {
    pub instances: Vec<TrainingInstance>,
    pub skipped: Vec<SkippedRequirement>,
}

/// Derives one training instance per requirement.
///
/// The gold template is the first of `templates` that matches the
/// requirement's tag sequence under the default inventory. Between 2 and 5
/// spans are drawn uniformly without replacement and kept in sentence
/// order; each becomes a token with the span text and an ISO role from the
/// inverse mapping. The generator is seeded with `seed` once for the whole
/// list.
pub fn reverse_engineer_training_set(
    reqs: &[AnnotatedRequirement],
    templates: &[VariableTemplate],
    seed: u64,
) -> ReverseEngineering {
    let inventory = TagInventory::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ReverseEngineering::default();
    for req in reqs {
        let mut skip = |reason: String| out.skipped.push(SkippedRequirement { id: req.id.clone(), reason });
        let spans = content_spans(req);
        if spans.len() < MIN_TOKENS {
            skip(format!("{} span(s), at least {MIN_TOKENS} needed", spans.len()));
            continue;
        }
        let sequence = match extract_tag_sequence(req) {
            Ok(s) => normalize_modals(&s),
            Err(e) => {
                skip(e.to_string());
                continue;
            }
        };
        let Some((template, binding)) = templates
            .iter()
            .find_map(|t| matches(t, &sequence, &inventory).map(|b| (t, b)))
        else {
            skip(format!("sequence {sequence} matches no template"));
            continue;
        };
        if let Some(span) = spans.iter().find(|s| s.tag.is_other()) {
            skip(format!("span tag {} is not scored", span.tag.propbank()));
            continue;
        }
        let rel = spans.iter().position(|s| s.tag == SrlTag::Rel).unwrap_or(spans.len());
        let k = rng.gen_range(MIN_TOKENS..=MAX_TOKENS.min(spans.len()));
        let mut chosen = sample(&mut rng, spans.len(), k).into_vec();
        chosen.sort_unstable();
        let tokens = chosen
            .iter()
            .enumerate()
            .map(|(position, &i)| {
                let span = spans[i];
                let leading = i == 0 && binding.prefix_bound;
                let role = iso_role_for(&span.tag, leading, i < rel);
                FeatureToken::new(&req.span_text(span), role, position)
            })
            .collect::<Result<Vec<_>, _>>();
        match tokens {
            Ok(tokens) => {
                let tags = chosen.iter().map(|&i| spans[i].tag.clone()).collect();
                out.instances.push(TrainingInstance { tokens, template_id: template.id, tags });
            }
            Err(e) => skip(e.to_string()),
        }
    }
    out
}
