//! Hashed lexical features for (token, role) lists.

use std::hash::Hasher;

use fnv::FnvHasher;

use super::{FeatureToken, RecommenderError};

/// Sparse L2-normalized feature vector with sorted, unique indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFeatures {
    pub dim: usize,
    pub entries: Vec<(u32, f64)>,
}

impl SparseFeatures {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            dense[i as usize] = v;
        }
        dense
    }

    pub fn scaled(&self, factor: f64) -> SparseFeatures {
        SparseFeatures {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, v)| (i, v * factor)).collect(),
        }
    }
}

const POSITION_BUCKETS: usize = 4;

fn bucket(key: &str, dim: usize, seed: u64) -> u32 {
    let mut hasher = FnvHasher::with_key(seed ^ 0xcbf2_9ce4_8422_2325);
    hasher.write(key.as_bytes());
    (hasher.finish() & (dim as u64 - 1)) as u32
}

fn char_ngrams(text: &str, sizes: std::ops::RangeInclusive<usize>) -> Vec<String> {
    let padded: Vec<char> = format!("<{}>", text.to_lowercase()).chars().collect();
    let mut grams = Vec::new();
    for n in sizes {
        if padded.len() < n {
            continue;
        }
        for window in padded.windows(n) {
            grams.push(window.iter().collect());
        }
    }
    grams
}

/// Bag of character 3-5-grams of each lowercased token, the token's role,
/// its position bucket, plus the token count, hashed into `dim` buckets.
pub fn featurize_sparse(tokens: &[FeatureToken], dim: usize, seed: u64) -> Result<SparseFeatures, RecommenderError> {
    if tokens.is_empty() {
        return Err(RecommenderError::InvalidArgument("cannot featurize an empty token list".into()));
    }
    if dim == 0 || !dim.is_power_of_two() {
        return Err(RecommenderError::InvalidArgument(format!("feature dimension {dim} is not a power of two")));
    }
    let mut counts: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    let mut add = |key: String| *counts.entry(bucket(&key, dim, seed)).or_default() += 1.0;
    for token in tokens {
        for gram in char_ngrams(&token.text, 3..=5) {
            add(format!("g:{gram}"));
        }
        add(format!("r:{}", token.role.code()));
        add(format!("p:{}", token.position.min(POSITION_BUCKETS)));
    }
    add(format!("n:{}", tokens.len()));

    let norm = counts.values().map(|v| v * v).sum::<f64>().sqrt();
    let entries = counts.into_iter().map(|(i, v)| (i, v / norm)).collect();
    Ok(SparseFeatures { dim, entries })
}

/// Dense form of [`featurize_sparse`].
pub fn featurize(tokens: &[FeatureToken], dim: usize, seed: u64) -> Result<Vec<f64>, RecommenderError> {
    featurize_sparse(tokens, dim, seed).map(|f| f.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::IsoRole;

    fn tok(text: &str, role: IsoRole, position: usize) -> FeatureToken {
        FeatureToken::new(text, role, position).unwrap()
    }

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    #[test]
    fn deterministic_and_normalized() {
        let tokens = [tok("Flight plan", IsoRole::Subject, 0), tok("UAV", IsoRole::Constraint, 1)];
        let a = featurize(&tokens, 1024, 7).unwrap();
        let b = featurize(&tokens, 1024, 7).unwrap();
        assert_eq!(a, b);
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-9);
        let norm: f64 = a.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn role_changes_the_vector() {
        let a = featurize(&[tok("UAV", IsoRole::Constraint, 0)], 1024, 7).unwrap();
        let b = featurize(&[tok("UAV", IsoRole::Subject, 0)], 1024, 7).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn seed_changes_hashing() {
        let t = [tok("display", IsoRole::Action, 0)];
        assert_ne!(featurize(&t, 1 << 15, 1).unwrap(), featurize(&t, 1 << 15, 2).unwrap());
    }

    #[test]
    fn bad_arguments() {
        assert!(featurize(&[], 1024, 0).is_err());
        assert!(featurize(&[tok("x", IsoRole::Action, 0)], 1000, 0).is_err());
    }

    #[test]
    fn short_text_still_has_ngrams() {
        let grams = char_ngrams("ab", 3..=5);
        assert_eq!(grams, ["<ab", "ab>", "<ab>"]);
    }
}
