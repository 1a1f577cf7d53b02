use std::collections::{BTreeMap, HashMap};

use super::EvaluationError;

pub(crate) fn ngram_counts(words: &[String], k: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    if k > 0 && words.len() >= k {
        for gram in words.windows(k) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped k-gram matches and the candidate's k-gram total.
pub fn modified_precision(candidate: &[String], references: &[Vec<String>], k: usize) -> (usize, usize) {
    let cand = ngram_counts(candidate, k);
    let mut max_ref: HashMap<&[String], usize> = HashMap::new();
    for reference in references {
        for (gram, c) in ngram_counts(reference, k) {
            let slot = max_ref.entry(gram).or_insert(0);
            *slot = (*slot).max(c);
        }
    }
    let matched = cand.iter().map(|(g, c)| (*c).min(max_ref.get(g).copied().unwrap_or(0))).sum();
    let total = candidate.len().saturating_sub(k - 1);
    (matched, total)
}

/// Length of the reference closest to `c`, ties to the shorter one.
fn closest_reference_length(c: usize, references: &[Vec<String>]) -> usize {
    references
        .iter()
        .map(Vec::len)
        .min_by_key(|&r| (r.abs_diff(c), r))
        .expect("references are non-empty")
}

/// Sentence BLEU-n: geometric mean of clipped 1..n-gram precisions times the
/// brevity penalty. Without smoothing any zero precision gives 0; with
/// smoothing, orders above 1 use (m+1)/(t+1).
pub fn bleu_n(candidate: &[String], references: &[Vec<String>], n: usize, smoothing: bool) -> Result<f64, EvaluationError> {
    if candidate.is_empty() {
        return Err(EvaluationError::InvalidArgument("candidate is empty".into()));
    }
    if references.is_empty() {
        return Err(EvaluationError::InvalidArgument("no references".into()));
    }
    if n == 0 {
        return Err(EvaluationError::InvalidArgument("BLEU order must be positive".into()));
    }
    let mut log_sum = 0.0;
    for k in 1..=n {
        let (m, t) = modified_precision(candidate, references, k);
        let p = if smoothing && k > 1 {
            (m as f64 + 1.0) / (t as f64 + 1.0)
        } else if t == 0 || m == 0 {
            return Ok(0.0);
        } else {
            m as f64 / t as f64
        };
        log_sum += p.ln();
    }
    let c = candidate.len();
    let r = closest_reference_length(c, references);
    let bp = if c < r { (1.0 - r as f64 / c as f64).exp() } else { 1.0 };
    Ok(bp * (log_sum / n as f64).exp())
}
