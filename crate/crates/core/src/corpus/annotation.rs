use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CorpusError, SrlTag};

/// Tagged word range, `start` inclusive and `end` exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub tag: SrlTag,
}

impl Span {
    pub fn new(start: usize, end: usize, tag: SrlTag) -> Self {
        Span { start, end, tag }
    }
}

/// A requirement sentence with the spans of its main predicate frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedRequirement {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    /// Token index of the frame's predicate, `None` when the source record
    /// carried no frame.
    pub predicate_index: Option<usize>,
    spans: Vec<Span>,
}

impl AnnotatedRequirement {
    /// Validates and builds a requirement. Spans are sorted by start; they
    /// must be non-empty, inside the token list and non-overlapping.
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        tokens: Vec<String>,
        predicate_index: Option<usize>,
        mut spans: Vec<Span>,
    ) -> Result<Self, String> {
        spans.sort_by_key(|s| (s.start, s.end));
        validate_spans(&spans, tokens.len())?;
        Ok(AnnotatedRequirement {
            id: id.into(),
            text: text.into(),
            tokens,
            predicate_index,
            spans,
        })
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn span_text(&self, span: &Span) -> String {
        self.tokens[span.start..span.end].join(" ")
    }
}

fn validate_spans(spans: &[Span], token_count: usize) -> Result<(), String> {
    let mut previous_end = 0;
    for (i, span) in spans.iter().enumerate() {
        if span.start >= span.end {
            return Err(format!("span {}..{} is empty or reversed", span.start, span.end));
        }
        if span.end > token_count {
            return Err(format!(
                "span {}..{} ({}) exceeds token count {token_count}",
                span.start,
                span.end,
                span.tag.propbank()
            ));
        }
        if i > 0 && span.start < previous_end {
            return Err(format!("span {}..{} overlaps the previous span", span.start, span.end));
        }
        previous_end = span.end;
    }
    Ok(())
}

/// Annotation schemas understood by [`ingest_annotations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnnotationFormat {
    #[default]
    Canonical,
}

impl FromStr for AnnotationFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" | "canonical-v1" => Ok(AnnotationFormat::Canonical),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for AnnotationFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("canonical-v1")
    }
}

/// A skipped record and the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub requirements: Vec<AnnotatedRequirement>,
    pub rejected: Vec<Rejection>,
}

#[derive(Deserialize)]
struct RawCorpus {
    requirements: Vec<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    tokens: Vec<String>,
    frames: Vec<RawFrame>,
}

#[derive(Serialize, Deserialize)]
struct RawFrame {
    predicate_index: usize,
    spans: Vec<RawSpan>,
}

#[derive(Serialize, Deserialize)]
struct RawSpan {
    start: usize,
    end: usize,
    tag: String,
}

#[derive(Serialize)]
struct RawCorpusOut<'a> {
    requirements: Vec<RawRecordOut<'a>>,
}

#[derive(Serialize)]
struct RawRecordOut<'a> {
    id: &'a str,
    text: &'a str,
    tokens: &'a [String],
    frames: Vec<RawFrame>,
}

/// Reads a canonical annotation file. Invalid records are skipped and listed
/// in the report; a file with no valid record is an error.
pub fn ingest_annotations(
    path: impl AsRef<Path>,
    format: AnnotationFormat,
) -> Result<IngestReport, CorpusError> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_annotations(&raw, format)
}

/// Ingests several files in parallel. Output order matches input order.
pub fn ingest_many<P: AsRef<Path> + Sync>(
    paths: &[P],
    format: AnnotationFormat,
) -> Vec<Result<IngestReport, CorpusError>> {
    paths
        .par_iter()
        .map(|p| ingest_annotations(p, format))
        .collect()
}

pub fn parse_annotations(json: &str, format: AnnotationFormat) -> Result<IngestReport, CorpusError> {
    let AnnotationFormat::Canonical = format;
    let corpus: RawCorpus =
        serde_json::from_str(json).map_err(|e| CorpusError::Schema(e.to_string()))?;

    let mut requirements = Vec::new();
    let mut rejected = Vec::new();
    for (i, value) in corpus.requirements.into_iter().enumerate() {
        let fallback_id = value
            .get("id")
            .and_then(|v| v.as_str())
            .map_or_else(|| format!("#{i}"), str::to_string);
        let record: RawRecord = match serde_json::from_value(value) {
            Ok(r) => r,
            Err(e) => {
                rejected.push(Rejection { id: fallback_id, reason: e.to_string() });
                continue;
            }
        };
        match convert_record(record) {
            Ok(req) => requirements.push(req),
            Err(reason) => rejected.push(Rejection { id: fallback_id, reason }),
        }
    }
    if requirements.is_empty() {
        return Err(CorpusError::EmptyCorpus { rejected });
    }
    Ok(IngestReport { requirements, rejected })
}

fn convert_record(record: RawRecord) -> Result<AnnotatedRequirement, String> {
    let mut frames = Vec::with_capacity(record.frames.len());
    for frame in &record.frames {
        if frame.predicate_index >= record.tokens.len() {
            return Err(format!(
                "predicate_index {} exceeds token count {}",
                frame.predicate_index,
                record.tokens.len()
            ));
        }
        let mut spans: Vec<Span> = frame
            .spans
            .iter()
            .map(|s| Span::new(s.start, s.end, SrlTag::parse(&s.tag)))
            .collect();
        spans.sort_by_key(|s| (s.start, s.end));
        validate_spans(&spans, record.tokens.len())?;
        frames.push((frame.predicate_index, spans));
    }
    // Main frame: most spans, ties broken by the earliest predicate.
    let main = frames
        .into_iter()
        .min_by_key(|(predicate, spans)| (std::cmp::Reverse(spans.len()), *predicate));
    let (predicate_index, spans) = match main {
        Some((p, spans)) => (Some(p), spans),
        None => (None, Vec::new()),
    };
    AnnotatedRequirement::new(record.id, record.text, record.tokens, predicate_index, spans)
}

/// Serializes requirements back to the canonical schema, one frame each.
pub fn to_canonical_json(requirements: &[AnnotatedRequirement]) -> String {
    let out = RawCorpusOut {
        requirements: requirements
            .iter()
            .map(|r| RawRecordOut {
                id: &r.id,
                text: &r.text,
                tokens: &r.tokens,
                frames: r
                    .predicate_index
                    .map(|p| RawFrame {
                        predicate_index: p,
                        spans: r
                            .spans
                            .iter()
                            .map(|s| RawSpan {
                                start: s.start,
                                end: s.end,
                                tag: s.tag.propbank().to_string(),
                            })
                            .collect(),
                    })
                    .into_iter()
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("annotation records always serialize")
}
