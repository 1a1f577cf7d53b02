use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::stem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeteorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MeteorParams {
    fn default() -> Self {
        MeteorParams { alpha: 0.9, beta: 3.0, gamma: 0.5 }
    }
}

/// Search budget for the chunk-minimizing alignment; the best alignment
/// found so far is used when it runs out.
const NODE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Exact,
    Stem,
}

struct Search {
    /// Per candidate position, the reference positions it may align to.
    options: Vec<Vec<(usize, Stage)>>,
    ref_used: Vec<bool>,
    need_exact: usize,
    need_stem: usize,
    /// Suffix sums of candidate positions that have an exact / any option.
    exact_left: Vec<usize>,
    any_left: Vec<usize>,
    best_chunks: usize,
    nodes: usize,
}

impl Search {
    fn run(&mut self, i: usize, last: Option<(usize, usize)>, exact: usize, stemmed: usize, chunks: usize) {
        self.nodes += 1;
        if chunks >= self.best_chunks || self.nodes > NODE_BUDGET {
            return;
        }
        if exact == self.need_exact && stemmed == self.need_stem {
            self.best_chunks = chunks;
            return;
        }
        if i == self.options.len()
            || exact + self.exact_left[i] < self.need_exact
            || exact + stemmed + self.any_left[i] < self.need_exact + self.need_stem
        {
            return;
        }
        let mut options = self.options[i].clone();
        // Try continuing the current chunk first.
        if let Some((li, lj)) = last {
            if li + 1 == i {
                if let Some(pos) = options.iter().position(|(j, _)| *j == lj + 1) {
                    options.swap(0, pos);
                }
            }
        }
        for (j, stage) in options {
            if self.ref_used[j] {
                continue;
            }
            let (e, s) = match stage {
                Stage::Exact if exact < self.need_exact => (exact + 1, stemmed),
                Stage::Stem if stemmed < self.need_stem => (exact, stemmed + 1),
                _ => continue,
            };
            let continues = matches!(last, Some((li, lj)) if li + 1 == i && lj + 1 == j);
            self.ref_used[j] = true;
            self.run(i + 1, Some((i, j)), e, s, chunks + usize::from(!continues));
            self.ref_used[j] = false;
        }
        self.run(i + 1, last, exact, stemmed, chunks);
    }
}

fn count_by<'a>(words: impl Iterator<Item = &'a String>) -> HashMap<&'a str, usize> {
    let mut counts = HashMap::new();
    for w in words {
        *counts.entry(w.as_str()).or_insert(0) += 1;
    }
    counts
}

/// Matched unigram count and chunk count of the METEOR alignment: exact
/// matches first, then stem matches among the rest, each stage maximal,
/// with the fewest chunks among such alignments.
pub fn meteor_alignment(candidate: &[String], reference: &[String]) -> (usize, usize) {
    let cand_counts = count_by(candidate.iter());
    let ref_counts = count_by(reference.iter());
    let need_exact: usize = cand_counts
        .iter()
        .map(|(w, c)| (*c).min(ref_counts.get(w).copied().unwrap_or(0)))
        .sum();

    // Words left after exact matching, grouped by stem.
    let leftover = |counts: &HashMap<&str, usize>, other: &HashMap<&str, usize>| {
        let mut by_stem: HashMap<String, usize> = HashMap::new();
        for (w, c) in counts {
            let rest = c - (*c).min(other.get(w).copied().unwrap_or(0));
            if rest > 0 {
                *by_stem.entry(stem(w)).or_insert(0) += rest;
            }
        }
        by_stem
    };
    let cand_left = leftover(&cand_counts, &ref_counts);
    let ref_left = leftover(&ref_counts, &cand_counts);
    let need_stem: usize = cand_left
        .iter()
        .map(|(s, c)| (*c).min(ref_left.get(s).copied().unwrap_or(0)))
        .sum();
    if need_exact + need_stem == 0 {
        return (0, 0);
    }

    let cand_stems: Vec<String> = candidate.iter().map(|w| stem(w)).collect();
    let ref_stems: Vec<String> = reference.iter().map(|w| stem(w)).collect();
    let options: Vec<Vec<(usize, Stage)>> = (0..candidate.len())
        .map(|i| {
            (0..reference.len())
                .filter_map(|j| {
                    if candidate[i] == reference[j] {
                        Some((j, Stage::Exact))
                    } else if cand_stems[i] == ref_stems[j] {
                        Some((j, Stage::Stem))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let mut exact_left = vec![0; candidate.len() + 1];
    let mut any_left = vec![0; candidate.len() + 1];
    for i in (0..candidate.len()).rev() {
        exact_left[i] = exact_left[i + 1] + usize::from(options[i].iter().any(|o| o.1 == Stage::Exact));
        any_left[i] = any_left[i + 1] + usize::from(!options[i].is_empty());
    }
    let mut search = Search {
        options,
        ref_used: vec![false; reference.len()],
        need_exact,
        need_stem,
        exact_left,
        any_left,
        best_chunks: usize::MAX,
        nodes: 0,
    };
    search.run(0, None, 0, 0, 0);
    let matched = need_exact + need_stem;
    let chunks = if search.best_chunks == usize::MAX { matched } else { search.best_chunks };
    (matched, chunks)
}

/// METEOR of a tokenized candidate against one tokenized reference.
pub fn meteor(candidate: &[String], reference: &[String], params: &MeteorParams) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let (m, chunks) = meteor_alignment(candidate, reference);
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    let precision = m / candidate.len() as f64;
    let recall = m / reference.len() as f64;
    let fmean = precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
    let penalty = params.gamma * (chunks as f64 / m).powf(params.beta);
    fmean * (1.0 - penalty)
}
