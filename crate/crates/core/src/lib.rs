//! Functional-requirement draft synthesis.
//!
//! The crate turns feature tokens annotated with ISO 29148 syntactic roles
//! into functional-requirement drafts. It is organised as a pipeline:
//!
//! - [`corpus`] ingests SRL-annotated requirements and extracts tag sequences.
//! - [`templates`] induces variable SRL templates from those sequences.
//! - [`recommender`] selects a template and predicts a tag per feature token,
//!   then binds the tokens into a concrete template variant.
//! - [`generation`] realizes a variant offline or sends a template-injected
//!   prompt to an external completion endpoint.
//! - [`evaluation`] scores drafts (BLEU, METEOR, NIST), samples token
//!   combinations, builds k-fold splits and runs significance tests.
//!
//! [`synth`] holds deterministic corpus generators used by tests and demos.

pub mod corpus;
pub mod evaluation;
pub mod generation;
pub mod recommender;
pub mod synth;
pub mod templates;

pub use corpus::{AnnotatedRequirement, IsoRole, Span, SrlTag, TagSequence};
pub use recommender::{FeatureToken, RecommenderModel, TemplateVariant};
pub use templates::{BackboneSlot, TagInventory, VariableTemplate};
