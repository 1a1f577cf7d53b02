use std::fmt;

use serde::{Deserialize, Serialize};

use super::{extract_tag_sequence, sentence_count, word_count, AnnotatedRequirement, SrlTag};

/// Thresholds for dropping requirements that are too complex or too simple
/// to yield a single clear tag sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterPolicy {
    pub drop_multi_sentence: bool,
    /// Requirements with fewer words are dropped.
    pub min_words: usize,
    /// Drop bare `[V][Arg1]` frames without a subject.
    pub verb_object_rule: bool,
    /// Frames with fewer tags are dropped.
    pub min_roles: usize,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy {
            drop_multi_sentence: true,
            min_words: 4,
            verb_object_rule: true,
            min_roles: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    MultiSentence,
    VerbObject,
    TooShort,
    TooFewRoles,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropReason::MultiSentence => "multi-sentence",
            DropReason::VerbObject => "verb-object",
            DropReason::TooShort => "too-short",
            DropReason::TooFewRoles => "too-few-roles",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dropped {
    pub id: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterOutcome {
    pub kept: Vec<AnnotatedRequirement>,
    pub dropped: Vec<Dropped>,
}

/// Classifies a single requirement; `None` means it is kept.
pub fn drop_reason(req: &AnnotatedRequirement, policy: &FilterPolicy) -> Option<DropReason> {
    if policy.drop_multi_sentence && sentence_count(&req.text) > 1 {
        return Some(DropReason::MultiSentence);
    }
    let tags = extract_tag_sequence(req).map(|s| s.tags).unwrap_or_default();
    if policy.verb_object_rule && tags == [SrlTag::Rel, SrlTag::Arg1] {
        return Some(DropReason::VerbObject);
    }
    if word_count(&req.tokens) < policy.min_words {
        return Some(DropReason::TooShort);
    }
    if tags.len() < policy.min_roles {
        return Some(DropReason::TooFewRoles);
    }
    None
}

pub fn filter_corpus(reqs: Vec<AnnotatedRequirement>, policy: &FilterPolicy) -> FilterOutcome {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for req in reqs {
        match drop_reason(&req, policy) {
            None => kept.push(req),
            Some(reason) => dropped.push(Dropped { id: req.id.clone(), reason }),
        }
    }
    FilterOutcome { kept, dropped }
}
