use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bleu_n, meteor, nist_corpus, nist_sentence, EvaluationError, MeteorParams, NistInfo};
use crate::corpus::tokenize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricParams {
    pub meteor: MeteorParams,
    pub nist_n: usize,
    pub bleu_smoothing: bool,
    pub lowercase: bool,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { meteor: MeteorParams::default(), nist_n: 5, bleu_smoothing: false, lowercase: true }
    }
}

impl MetricParams {
    pub fn words(&self, text: &str) -> Vec<String> {
        let tokens = tokenize(text);
        if self.lowercase {
            tokens.into_iter().map(|t| t.to_lowercase()).collect()
        } else {
            tokens
        }
    }
}

/// Where a report's inputs came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub dataset: Option<String>,
    pub system: Option<String>,
    pub sampler: Option<String>,
    pub fold: Option<usize>,
    pub seeds: BTreeMap<String, u64>,
}

#[derive(Debug, Clone)]
pub struct EvalSample {
    pub id: String,
    pub candidate: String,
    pub references: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScores {
    pub id: String,
    pub bleu2: f64,
    pub bleu3: f64,
    pub bleu4: f64,
    pub meteor: f64,
    pub nist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateScores {
    pub bleu2: f64,
    pub bleu3: f64,
    pub bleu4: f64,
    pub meteor: f64,
    pub nist: f64,
    /// NIST over the whole corpus rather than the per-sample mean.
    pub corpus_nist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub manifest: RunManifest,
    pub config: MetricParams,
    pub per_sample: Vec<SampleScores>,
    pub aggregate: AggregateScores,
}

/// Scores every sample (in parallel, order kept) and averages.
pub fn evaluate(samples: &[EvalSample], params: &MetricParams, manifest: RunManifest) -> Result<MetricReport, EvaluationError> {
    if samples.is_empty() {
        return Err(EvaluationError::InvalidArgument("nothing to evaluate".into()));
    }
    let tokenized: Vec<(Vec<String>, Vec<Vec<String>>)> = samples
        .iter()
        .map(|s| (params.words(&s.candidate), s.references.iter().map(|r| params.words(r)).collect()))
        .collect();
    for (sample, (candidate, references)) in samples.iter().zip(&tokenized) {
        if candidate.is_empty() {
            return Err(EvaluationError::InvalidArgument(format!("sample {}: empty candidate", sample.id)));
        }
        if references.is_empty() || references.iter().all(Vec::is_empty) {
            return Err(EvaluationError::InvalidArgument(format!("sample {}: no reference", sample.id)));
        }
    }
    let info = NistInfo::from_references(tokenized.iter().flat_map(|(_, r)| r.iter()), params.nist_n)?;
    let per_sample = samples
        .par_iter()
        .zip(tokenized.par_iter())
        .map(|(sample, (candidate, references))| {
            let bleu = |n| bleu_n(candidate, references, n, params.bleu_smoothing);
            Ok(SampleScores {
                id: sample.id.clone(),
                bleu2: bleu(2)?,
                bleu3: bleu(3)?,
                bleu4: bleu(4)?,
                meteor: references.iter().map(|r| meteor(candidate, r, &params.meteor)).fold(0.0, f64::max),
                nist: nist_sentence(&info, candidate, references),
            })
        })
        .collect::<Result<Vec<_>, EvaluationError>>()?;
    let n = per_sample.len() as f64;
    let mean = |f: fn(&SampleScores) -> f64| per_sample.iter().map(f).sum::<f64>() / n;
    let aggregate = AggregateScores {
        bleu2: mean(|s| s.bleu2),
        bleu3: mean(|s| s.bleu3),
        bleu4: mean(|s| s.bleu4),
        meteor: mean(|s| s.meteor),
        nist: mean(|s| s.nist),
        corpus_nist: nist_corpus(&tokenized, params.nist_n)?,
    };
    Ok(MetricReport { manifest, config: params.clone(), per_sample, aggregate })
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-sample rows preceded by `#` manifest lines and followed by a
    /// `mean` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let m = &self.manifest;
        let opt = |v: &Option<String>| v.clone().unwrap_or_default();
        out.push_str(&format!("# dataset={}\n# system={}\n# sampler={}\n", opt(&m.dataset), opt(&m.system), opt(&m.sampler)));
        if let Some(fold) = m.fold {
            out.push_str(&format!("# fold={fold}\n"));
        }
        for (name, seed) in &m.seeds {
            out.push_str(&format!("# seed.{name}={seed}\n"));
        }
        out.push_str("id,bleu2,bleu3,bleu4,meteor,nist\n");
        let quote = |id: &str| {
            if id.contains([',', '"', '\n']) {
                format!("\"{}\"", id.replace('"', "\"\""))
            } else {
                id.to_string()
            }
        };
        for s in &self.per_sample {
            out.push_str(&format!("{},{},{},{},{},{}\n", quote(&s.id), s.bleu2, s.bleu3, s.bleu4, s.meteor, s.nist));
        }
        let a = &self.aggregate;
        out.push_str(&format!("mean,{},{},{},{},{}\n", a.bleu2, a.bleu3, a.bleu4, a.meteor, a.nist));
        out
    }
}
