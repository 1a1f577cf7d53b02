pub mod evaluate;
pub mod generate;
pub mod induce;
pub mod recommend;
pub mod train;

use std::path::PathBuf;

use reqsynth::corpus::{ingest_many, AnnotatedRequirement, AnnotationFormat, Rejection};

use crate::error::{CliError, CliResult};

/// Ingests every corpus file, in order.
pub fn load_corpus(paths: &[PathBuf]) -> CliResult<(Vec<AnnotatedRequirement>, Vec<Rejection>)> {
    if paths.is_empty() {
        return Err(CliError::input("no corpus given (use --corpus)"));
    }
    let mut requirements = Vec::new();
    let mut rejected = Vec::new();
    for (path, report) in paths.iter().zip(ingest_many(paths, AnnotationFormat::Canonical)) {
        let report = report.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        requirements.extend(report.requirements);
        rejected.extend(report.rejected);
    }
    for r in &rejected {
        eprintln!("skipped record {}: {}", r.id, r.reason);
    }
    Ok((requirements, rejected))
}
