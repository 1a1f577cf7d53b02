//! SRL-annotated requirement corpora: ingestion, filtering and tag-sequence
//! extraction.

mod annotation;
mod filter;
mod sequence;
mod tags;
mod text;

pub use annotation::{
    ingest_annotations, ingest_many, parse_annotations, to_canonical_json, AnnotatedRequirement,
    AnnotationFormat, IngestReport, Rejection, Span,
};
pub use filter::{drop_reason, filter_corpus, DropReason, Dropped, FilterOutcome, FilterPolicy};
pub use sequence::{content_spans, extract_tag_sequence, TagSequence, MODALS};
pub use tags::{IsoRole, SrlTag};
pub use text::{sentence_count, split_sentences, tokenize, word_count, ABBREVIATIONS};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("annotation file does not match the canonical schema: {0}")]
    Schema(String),
    #[error("unknown annotation format `{0}`")]
    UnknownFormat(String),
    #[error("corpus has no valid requirement ({} record(s) rejected)", rejected.len())]
    EmptyCorpus { rejected: Vec<Rejection> },
    #[error("requirement {0} has no predicate frame")]
    NoPredicateFrame(String),
}
