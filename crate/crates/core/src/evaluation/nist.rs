use std::collections::HashMap;

use super::bleu::ngram_counts;
use super::EvaluationError;

/// Information weight of every reference k-gram, k = 1..=n:
/// `log2(count(prefix) / count(gram))`, where the prefix count of a unigram
/// is the total number of reference words.
#[derive(Debug, Clone)]
pub struct NistInfo {
    pub n: usize,
    info: HashMap<Vec<String>, f64>,
}

impl NistInfo {
    pub fn from_references<'a>(references: impl IntoIterator<Item = &'a Vec<String>>, n: usize) -> Result<Self, EvaluationError> {
        if n == 0 {
            return Err(EvaluationError::InvalidArgument("NIST order must be positive".into()));
        }
        let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
        let mut words = 0usize;
        for reference in references {
            words += reference.len();
            for k in 1..=n {
                for (gram, c) in ngram_counts(reference, k) {
                    *counts.entry(gram.to_vec()).or_insert(0) += c;
                }
            }
        }
        if words == 0 {
            return Err(EvaluationError::InvalidArgument("reference corpus is empty".into()));
        }
        let info = counts
            .iter()
            .map(|(gram, &c)| {
                let prefix = if gram.len() == 1 { words } else { counts[&gram[..gram.len() - 1]] };
                (gram.clone(), (prefix as f64 / c as f64).log2())
            })
            .collect();
        Ok(NistInfo { n, info })
    }

    pub fn info(&self, gram: &[String]) -> f64 {
        self.info.get(gram).copied().unwrap_or(0.0)
    }

    /// Per order k, the information of clipped matches and the candidate's
    /// k-gram total.
    fn terms(&self, candidate: &[String], references: &[Vec<String>]) -> Vec<(f64, usize)> {
        (1..=self.n)
            .map(|k| {
                let mut max_ref: HashMap<&[String], usize> = HashMap::new();
                for reference in references {
                    for (gram, c) in ngram_counts(reference, k) {
                        let slot = max_ref.entry(gram).or_insert(0);
                        *slot = (*slot).max(c);
                    }
                }
                let matched: f64 = ngram_counts(candidate, k)
                    .into_iter()
                    .map(|(gram, c)| c.min(max_ref.get(gram).copied().unwrap_or(0)) as f64 * self.info(gram))
                    .sum();
                (matched, candidate.len().saturating_sub(k - 1))
            })
            .collect()
    }
}

/// Brevity factor `exp(beta * ln^2(min(c/r, 1)))` with beta chosen so the
/// factor is 0.5 at c/r = 2/3.
pub fn nist_brevity(candidate_len: f64, reference_len: f64) -> f64 {
    if reference_len <= 0.0 {
        return 1.0;
    }
    let ratio = (candidate_len / reference_len).min(1.0);
    if ratio <= 0.0 {
        return 0.0;
    }
    let beta = 0.5f64.ln() / (2.0f64 / 3.0).ln().powi(2);
    (beta * ratio.ln().powi(2)).exp()
}

fn mean_len(references: &[Vec<String>]) -> f64 {
    references.iter().map(|r| r.len() as f64).sum::<f64>() / references.len() as f64
}

/// NIST of one candidate against its references, with info weights taken
/// from `info`.
pub fn nist_sentence(info: &NistInfo, candidate: &[String], references: &[Vec<String>]) -> f64 {
    if references.is_empty() {
        return 0.0;
    }
    let score: f64 = info
        .terms(candidate, references)
        .into_iter()
        .filter(|(_, t)| *t > 0)
        .map(|(m, t)| m / t as f64)
        .sum();
    score * nist_brevity(candidate.len() as f64, mean_len(references))
}

/// Corpus NIST over aligned (candidate, references) pairs. Info weights come
/// from all references; match information and k-gram totals are summed over
/// the corpus before dividing.
pub fn nist_corpus(pairs: &[(Vec<String>, Vec<Vec<String>>)], n: usize) -> Result<f64, EvaluationError> {
    let info = NistInfo::from_references(pairs.iter().flat_map(|(_, refs)| refs.iter()), n)?;
    let mut matched = vec![0.0; n];
    let mut totals = vec![0usize; n];
    let mut cand_len = 0.0;
    let mut ref_len = 0.0;
    for (candidate, references) in pairs {
        if references.is_empty() {
            return Err(EvaluationError::InvalidArgument("sample without references".into()));
        }
        for (k, (m, t)) in info.terms(candidate, references).into_iter().enumerate() {
            matched[k] += m;
            totals[k] += t;
        }
        cand_len += candidate.len() as f64;
        ref_len += mean_len(references);
    }
    let score: f64 = matched.iter().zip(&totals).filter(|(_, t)| **t > 0).map(|(m, t)| m / *t as f64).sum();
    Ok(score * nist_brevity(cand_len, ref_len))
}
