//! Variable SRL templates: representation, induction, matching and variant
//! counting.

mod count;
mod induce;
mod matching;
mod template;

pub use count::count_variants;
pub use induce::{
    induce_templates, induce_templates_with, InductionReport, MergeEvent, MergeRule, UncoveredSequence,
};
pub use matching::{matches, repeatable, Binding};
pub use template::{
    parse_template_line, parse_templates, render_templates, BackboneSlot, TagInventory, VariableTemplate,
};

use crate::corpus::TagSequence;

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("template {id}: {reason}")]
    InvalidTemplate { id: u32, reason: String },
    #[error("cannot parse template line `{line}`: {reason}")]
    Syntax { line: String, reason: String },
    #[error("duplicate template id {0}")]
    DuplicateId(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Rewrites any observed modal to `shall`; tags are untouched.
pub fn normalize_modals(seq: &TagSequence) -> TagSequence {
    TagSequence {
        tags: seq.tags.clone(),
        modal: seq.modal.as_ref().map(|_| "shall".to_string()),
    }
}
