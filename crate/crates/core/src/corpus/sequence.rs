use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AnnotatedRequirement, CorpusError, Span, SrlTag};

/// Modal verbs recognised between the subject span and the predicate.
pub const MODALS: [&str; 6] = ["shall", "must", "will", "should", "may", "can"];

/// PropBank label of modal adjuncts. These spans feed the `modal` field
/// instead of the tag list.
const MODAL_ADJUNCT: &str = "ARGM-MOD";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TagSequence {
    pub tags: Vec<SrlTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modal: Option<String>,
}

impl TagSequence {
    pub fn new(tags: Vec<SrlTag>, modal: Option<&str>) -> Self {
        TagSequence { tags, modal: modal.map(str::to_string) }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn has_other(&self) -> bool {
        self.tags.iter().any(SrlTag::is_other)
    }
}

/// Bracket rendering, e.g. `[Arg0]shall[V][Arg1]`. The modal, when present,
/// is written before the first predicate.
impl fmt::Display for TagSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut modal_written = false;
        for tag in &self.tags {
            if *tag == SrlTag::Rel && !modal_written {
                if let Some(m) = &self.modal {
                    f.write_str(m)?;
                }
                modal_written = true;
            }
            write!(f, "[{tag}]")?;
        }
        Ok(())
    }
}

fn is_modal_adjunct(tag: &SrlTag) -> bool {
    matches!(tag, SrlTag::Other(label) if label.eq_ignore_ascii_case(MODAL_ADJUNCT))
}

/// Spans that contribute a tag to the sequence, i.e. all except the modal
/// adjunct.
pub fn content_spans(req: &AnnotatedRequirement) -> Vec<&Span> {
    req.spans().iter().filter(|s| !is_modal_adjunct(&s.tag)).collect()
}

/// Extracts the tag sequence of a requirement's main frame.
///
/// Tags follow span order with repeats kept. The modal is the first word from
/// [`MODALS`] found between the last ARG0/ARG1 span preceding the predicate
/// and the predicate itself.
pub fn extract_tag_sequence(req: &AnnotatedRequirement) -> Result<TagSequence, CorpusError> {
    let spans = req.spans();
    if spans.is_empty() {
        return Err(CorpusError::NoPredicateFrame(req.id.clone()));
    }
    let tags: Vec<SrlTag> = content_spans(req).into_iter().map(|s| s.tag.clone()).collect();

    let modal = spans.iter().position(|s| s.tag == SrlTag::Rel).and_then(|rel| {
        let subject = spans[..rel]
            .iter()
            .rposition(|s| matches!(s.tag, SrlTag::Arg0 | SrlTag::Arg1))?;
        req.tokens[spans[subject].end..spans[rel].start]
            .iter()
            .map(|w| w.to_lowercase())
            .find(|w| MODALS.contains(&w.as_str()))
    });

    Ok(TagSequence { tags, modal })
}
