use std::borrow::Cow;
use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{featurize_sparse, FeatureToken, RecommenderError, SparseFeatures};
use crate::corpus::SrlTag;

/// Schema tag written into every model file.
pub const MODEL_VERSION: &str = "key2temp-lite/1";

/// Linear map from the hashed feature space to the embedding space.
///
/// Columns are generated on demand from `init_seed`, so only the columns
/// touched by training are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub rows: usize,
    pub init_seed: u64,
    pub init_scale: f64,
    pub columns: BTreeMap<u32, Vec<f64>>,
}

impl Projection {
    /// Uniform initialization scaled so a column has unit expected norm.
    pub fn new(rows: usize, init_seed: u64) -> Self {
        Projection { rows, init_seed, init_scale: (3.0 / rows as f64).sqrt(), columns: BTreeMap::new() }
    }

    fn initial_column(&self, j: u32) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.init_seed ^ u64::from(j).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        (0..self.rows).map(|_| rng.gen_range(-1.0..1.0) * self.init_scale).collect()
    }

    pub fn column(&self, j: u32) -> Cow<'_, [f64]> {
        match self.columns.get(&j) {
            Some(c) => Cow::Borrowed(c),
            None => Cow::Owned(self.initial_column(j)),
        }
    }

    pub fn column_mut(&mut self, j: u32) -> &mut Vec<f64> {
        if !self.columns.contains_key(&j) {
            let c = self.initial_column(j);
            self.columns.insert(j, c);
        }
        self.columns.get_mut(&j).unwrap()
    }

    pub fn project(&self, x: &SparseFeatures) -> Vec<f64> {
        let mut z = vec![0.0; self.rows];
        for &(j, v) in &x.entries {
            for (zi, ci) in z.iter_mut().zip(self.column(j).iter()) {
                *zi += v * ci;
            }
        }
        z
    }
}

/// Template probabilities for one feature, in template-id order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemplateSelection {
    pub template_id: u32,
    pub probabilities: Vec<(u32, f64)>,
}

impl TemplateSelection {
    /// Probabilities sorted high to low, ties by lower id.
    pub fn ranked(&self) -> Vec<(u32, f64)> {
        let mut ranked = self.probabilities.clone();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let d = norm(a) * norm(b);
    if d == 0.0 {
        0.0
    } else {
        dot(a, b) / d
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Trained Key2Temp-lite parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommenderModel {
    pub version: String,
    pub feature_dim: usize,
    pub embed_dim: usize,
    pub hash_seed: u64,
    pub margin: f64,
    /// Multiplier applied to cosine similarities before the softmax.
    pub logit_scale: f64,
    pub template_embeddings: BTreeMap<u32, Vec<f64>>,
    pub instance_projection: Projection,
    /// Per hashed feature, one weight for each of the eight named tags.
    /// Absent rows are zero.
    pub tag_weights: BTreeMap<u32, [f64; 8]>,
}

impl RecommenderModel {
    /// A model with random template embeddings, a random projection and
    /// zero tag weights.
    pub fn initialized(
        template_ids: &[u32],
        feature_dim: usize,
        embed_dim: usize,
        hash_seed: u64,
        margin: f64,
        seed: u64,
    ) -> Result<Self, RecommenderError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = (3.0 / embed_dim as f64).sqrt();
        let mut ids = template_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let template_embeddings = ids
            .into_iter()
            .map(|id| (id, (0..embed_dim).map(|_| rng.gen_range(-1.0..1.0) * scale).collect()))
            .collect();
        let model = RecommenderModel {
            version: MODEL_VERSION.to_string(),
            feature_dim,
            embed_dim,
            hash_seed,
            margin,
            logit_scale: 1.0,
            template_embeddings,
            instance_projection: Projection::new(embed_dim, rng.gen()),
            tag_weights: BTreeMap::new(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), RecommenderError> {
        let bad = |m: String| Err(RecommenderError::MalformedModel(m));
        if self.feature_dim == 0 || !self.feature_dim.is_power_of_two() {
            return bad(format!("feature_dim {} is not a power of two", self.feature_dim));
        }
        if self.embed_dim == 0 || self.instance_projection.rows != self.embed_dim {
            return bad(format!("projection has {} rows, embed_dim is {}", self.instance_projection.rows, self.embed_dim));
        }
        if !(self.margin > 0.0) {
            return bad(format!("margin {} is not positive", self.margin));
        }
        if !(self.logit_scale > 0.0) {
            return bad(format!("logit_scale {} is not positive", self.logit_scale));
        }
        if self.template_embeddings.is_empty() {
            return bad("no template embeddings".into());
        }
        if let Some((id, _)) = self.template_embeddings.iter().find(|(_, e)| e.len() != self.embed_dim) {
            return bad(format!("embedding of template {id} has the wrong length"));
        }
        let limit = self.feature_dim as u32;
        if let Some(j) = self.instance_projection.columns.iter().find_map(|(j, c)| {
            (*j >= limit || c.len() != self.embed_dim).then_some(*j)
        }) {
            return bad(format!("projection column {j} is out of range or has the wrong length"));
        }
        if let Some(j) = self.tag_weights.keys().find(|j| **j >= limit) {
            return bad(format!("tag weight row {j} is out of range"));
        }
        Ok(())
    }

    pub fn features(&self, tokens: &[FeatureToken]) -> Result<SparseFeatures, RecommenderError> {
        featurize_sparse(tokens, self.feature_dim, self.hash_seed)
    }

    pub fn select_template(&self, tokens: &[FeatureToken]) -> Result<TemplateSelection, RecommenderError> {
        Ok(self.select_from_features(&self.features(tokens)?))
    }

    /// Softmax over scaled cosine similarities between the projected vector
    /// and each template embedding; argmax with ties to the lower id.
    pub fn select_from_features(&self, x: &SparseFeatures) -> TemplateSelection {
        let z = self.instance_projection.project(x);
        let logits: Vec<f64> = self
            .template_embeddings
            .values()
            .map(|e| self.logit_scale * cosine(&z, e))
            .collect();
        let probs = softmax(&logits);
        let probabilities: Vec<(u32, f64)> = self.template_embeddings.keys().copied().zip(probs).collect();
        let mut best = probabilities[0];
        for &(id, p) in &probabilities[1..] {
            if p > best.1 {
                best = (id, p);
            }
        }
        TemplateSelection { template_id: best.0, probabilities }
    }

    /// Scores of the eight named tags for a feature vector.
    pub fn tag_scores(&self, x: &SparseFeatures) -> [f64; 8] {
        let mut scores = [0.0; 8];
        for &(j, v) in &x.entries {
            if let Some(w) = self.tag_weights.get(&j) {
                for (s, wk) in scores.iter_mut().zip(w) {
                    *s += v * wk;
                }
            }
        }
        scores
    }

    /// Highest-scoring tag per token, featurizing each token on its own.
    /// Ties go to the earlier tag in canonical order.
    pub fn predict_tags(&self, tokens: &[FeatureToken]) -> Result<Vec<SrlTag>, RecommenderError> {
        tokens
            .iter()
            .map(|t| {
                let scores = self.tag_scores(&self.features(std::slice::from_ref(t))?);
                Ok(SrlTag::NAMED[argmax(&scores)].clone())
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, RecommenderError> {
        let value: serde_json::Value =
            serde_json::from_str(json).map_err(|e| RecommenderError::MalformedModel(e.to_string()))?;
        let found = value.get("version").and_then(|v| v.as_str()).unwrap_or("").to_string();
        if found != MODEL_VERSION {
            return Err(RecommenderError::VersionMismatch { found, expected: MODEL_VERSION.to_string() });
        }
        let model: RecommenderModel =
            serde_json::from_str(json).map_err(|e| RecommenderError::MalformedModel(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), RecommenderError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, RecommenderError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Index of the first maximum.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::IsoRole;

    fn model() -> RecommenderModel {
        RecommenderModel::initialized(&[1, 2], 1 << 12, 16, 3, 0.2, 11).unwrap()
    }

    fn tokens() -> Vec<FeatureToken> {
        FeatureToken::list([("Flight plan", IsoRole::Subject), ("UAV", IsoRole::Constraint)]).unwrap()
    }

    #[test]
    fn identical_embeddings_give_uniform_probabilities() {
        let mut m = model();
        let e = m.template_embeddings[&1].clone();
        m.template_embeddings.insert(2, e);
        let s = m.select_template(&tokens()).unwrap();
        assert_eq!(s.template_id, 1);
        assert!((s.probabilities[0].1 - 0.5).abs() < 1e-12);
        assert!((s.probabilities[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_weights_predict_rel() {
        let m = model();
        assert_eq!(m.predict_tags(&tokens()).unwrap(), [SrlTag::Rel, SrlTag::Rel]);
    }

    #[test]
    fn selection_is_scale_invariant() {
        let m = model();
        let x = m.features(&tokens()).unwrap();
        let a = m.select_from_features(&x);
        let b = m.select_from_features(&x.scaled(37.5));
        assert_eq!(a.template_id, b.template_id);
        for (p, q) in a.probabilities.iter().zip(&b.probabilities) {
            assert!((p.1 - q.1).abs() < 1e-12);
        }
    }

    #[test]
    fn lazy_columns_match_materialized_ones() {
        let mut p = Projection::new(8, 5);
        let lazy = p.column(42).into_owned();
        assert_eq!(p.column_mut(42).clone(), lazy);
        assert_eq!(p.column(42).into_owned(), lazy);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut m = model();
        m.tag_weights.insert(7, [0.1, -0.3, 1e-17, 2.0 / 3.0, 0.0, 5.0, -1.0, 0.25]);
        m.instance_projection.column_mut(3)[0] = std::f64::consts::PI;
        let back = RecommenderModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let x = m.features(&tokens()).unwrap();
        assert_eq!(back.select_from_features(&x), m.select_from_features(&x));
    }

    #[test]
    fn version_mismatch_is_refused() {
        let json = model().to_json().replace(MODEL_VERSION, "key2temp-lite/0");
        assert!(matches!(RecommenderModel::from_json(&json), Err(RecommenderError::VersionMismatch { .. })));
    }

    #[test]
    fn invalid_models_are_rejected() {
        let mut m = model();
        m.margin = 0.0;
        assert!(RecommenderModel::from_json(&m.to_json()).is_err());
        assert!(RecommenderModel::initialized(&[1], 1000, 16, 0, 0.2, 0).is_err());
    }
}
