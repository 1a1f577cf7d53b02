//! Full-batch gradient descent for both tasks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::model::{cosine, norm, softmax};
use super::{fallback_recommend, featurize_sparse, RecommenderError, RecommenderModel, TrainingInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub margin: f64,
    /// Hashed feature dimension, a power of two.
    pub dim: usize,
    pub embed_dim: usize,
    pub logit_scale: f64,
    pub seed: u64,
    /// Keep the template embeddings at their initial values.
    pub freeze_template_embeddings: bool,
    /// Templates to embed in addition to those seen in the instances.
    pub template_ids: Vec<u32>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: 0.1,
            margin: 0.2,
            dim: 32768,
            embed_dim: 64,
            logit_scale: 1.0,
            seed: 0,
            freeze_template_embeddings: false,
            template_ids: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochLosses {
    pub epoch: usize,
    pub task1: f64,
    pub task2: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: RecommenderModel,
    /// Losses measured before each epoch's update, then once after training.
    pub history: Vec<EpochLosses>,
}

impl TrainOutcome {
    pub fn final_losses(&self) -> EpochLosses {
        *self.history.last().expect("history always has the final entry")
    }
}

/// Training data with features hashed once and columns addressed densely.
struct Prepared {
    /// Hashed index of each local feature column.
    features: Vec<u32>,
    instances: Vec<Vec<(usize, f64)>>,
    gold_template: Vec<usize>,
    tokens: Vec<Vec<(usize, f64)>>,
    gold_tag: Vec<usize>,
}

fn prepare(instances: &[TrainingInstance], model: &RecommenderModel, ids: &[u32]) -> Result<Prepared, RecommenderError> {
    let mut local: BTreeMap<u32, usize> = BTreeMap::new();
    let mut features = Vec::new();
    let mut localize = |x: super::SparseFeatures| -> Vec<(usize, f64)> {
        x.entries
            .into_iter()
            .map(|(j, v)| {
                let idx = *local.entry(j).or_insert_with(|| {
                    features.push(j);
                    features.len() - 1
                });
                (idx, v)
            })
            .collect()
    };
    let mut prepared_instances = Vec::new();
    let mut gold_template = Vec::new();
    let mut tokens = Vec::new();
    let mut gold_tag = Vec::new();
    for inst in instances {
        prepared_instances.push(localize(model.features(&inst.tokens)?));
        gold_template.push(ids.iter().position(|id| *id == inst.template_id).expect("ids cover instances"));
        for (token, tag) in inst.tokens.iter().zip(&inst.tags) {
            tokens.push(localize(featurize_sparse(std::slice::from_ref(token), model.feature_dim, model.hash_seed)?));
            gold_tag.push(tag.index().expect("validated"));
        }
    }
    Ok(Prepared { features, instances: prepared_instances, gold_template, tokens, gold_tag })
}

fn project(columns: &[Vec<f64>], x: &[(usize, f64)], rows: usize) -> Vec<f64> {
    let mut z = vec![0.0; rows];
    for &(j, v) in x {
        for (zi, c) in z.iter_mut().zip(&columns[j]) {
            *zi += v * c;
        }
    }
    z
}

fn scores(weights: &[[f64; 8]], x: &[(usize, f64)]) -> [f64; 8] {
    let mut s = [0.0; 8];
    for &(j, v) in x {
        for (sk, w) in s.iter_mut().zip(&weights[j]) {
            *sk += v * w;
        }
    }
    s
}

fn hinge(s: &[f64; 8], gold: usize, margin: f64) -> f64 {
    (0..8)
        .filter(|&k| k != gold)
        .map(|k| (margin - (s[gold] - s[k])).max(0.0))
        .sum()
}

struct State {
    rows: usize,
    logit_scale: f64,
    margin: f64,
    columns: Vec<Vec<f64>>,
    embeddings: Vec<Vec<f64>>,
    weights: Vec<[f64; 8]>,
}

impl State {
    fn task1_loss(&self, data: &Prepared) -> f64 {
        let total: f64 = data
            .instances
            .iter()
            .zip(&data.gold_template)
            .map(|(x, &gold)| {
                let z = project(&self.columns, x, self.rows);
                let logits: Vec<f64> = self.embeddings.iter().map(|e| self.logit_scale * cosine(&z, e)).collect();
                -softmax(&logits)[gold].ln()
            })
            .sum();
        total / data.instances.len() as f64
    }

    fn task2_loss(&self, data: &Prepared) -> f64 {
        let total: f64 = data
            .tokens
            .iter()
            .zip(&data.gold_tag)
            .map(|(x, &gold)| hinge(&scores(&self.weights, x), gold, self.margin))
            .sum();
        total / data.tokens.len() as f64
    }

    fn task1_step(&mut self, data: &Prepared, lr: f64, update_embeddings: bool) {
        let n = data.instances.len() as f64;
        let mut grad_columns = vec![vec![0.0; self.rows]; self.columns.len()];
        let mut grad_embeddings = vec![vec![0.0; self.rows]; self.embeddings.len()];
        for (x, &gold) in data.instances.iter().zip(&data.gold_template) {
            let z = project(&self.columns, x, self.rows);
            let nz = norm(&z);
            if nz == 0.0 {
                continue;
            }
            let cos: Vec<f64> = self.embeddings.iter().map(|e| cosine(&z, e)).collect();
            let logits: Vec<f64> = cos.iter().map(|c| self.logit_scale * c).collect();
            let p = softmax(&logits);
            let mut dz = vec![0.0; self.rows];
            for (t, e) in self.embeddings.iter().enumerate() {
                let ne = norm(e);
                if ne == 0.0 {
                    continue;
                }
                let g = self.logit_scale * (p[t] - if t == gold { 1.0 } else { 0.0 });
                for i in 0..self.rows {
                    dz[i] += g * (e[i] / (nz * ne) - cos[t] * z[i] / (nz * nz));
                    grad_embeddings[t][i] += g * (z[i] / (nz * ne) - cos[t] * e[i] / (ne * ne));
                }
            }
            for &(j, v) in x {
                for (gc, d) in grad_columns[j].iter_mut().zip(&dz) {
                    *gc += v * d;
                }
            }
        }
        for (column, grad) in self.columns.iter_mut().zip(&grad_columns) {
            for (c, g) in column.iter_mut().zip(grad) {
                *c -= lr * g / n;
            }
        }
        if update_embeddings {
            for (e, grad) in self.embeddings.iter_mut().zip(&grad_embeddings) {
                for (ei, g) in e.iter_mut().zip(grad) {
                    *ei -= lr * g / n;
                }
            }
        }
    }

    /// Descends the summed per-token hinge.
    fn task2_step(&mut self, data: &Prepared, lr: f64) {
        let mut grad = vec![[0.0; 8]; self.weights.len()];
        for (x, &gold) in data.tokens.iter().zip(&data.gold_tag) {
            let s = scores(&self.weights, x);
            for k in (0..8).filter(|&k| k != gold) {
                if self.margin - (s[gold] - s[k]) > 0.0 {
                    for &(j, v) in x {
                        grad[j][gold] -= v;
                        grad[j][k] += v;
                    }
                }
            }
        }
        for (w, g) in self.weights.iter_mut().zip(&grad) {
            for k in 0..8 {
                w[k] -= lr * g[k];
            }
        }
    }
}

fn validate(instances: &[TrainingInstance], config: &TrainConfig) -> Result<(), RecommenderError> {
    let arg = |m: String| Err(RecommenderError::InvalidArgument(m));
    if instances.is_empty() {
        return arg("no training instances".into());
    }
    if config.epochs == 0 || !(config.learning_rate > 0.0) || !config.learning_rate.is_finite() {
        return arg("epochs and learning_rate must be positive".into());
    }
    for (i, inst) in instances.iter().enumerate() {
        inst.check().map_err(|m| RecommenderError::InvalidArgument(format!("instance {i}: {m}")))?;
    }
    Ok(())
}

/// Trains both tasks jointly for `config.epochs` full-batch steps.
pub fn train(instances: &[TrainingInstance], config: &TrainConfig) -> Result<TrainOutcome, RecommenderError> {
    validate(instances, config)?;
    let ids: BTreeSet<u32> = config
        .template_ids
        .iter()
        .copied()
        .chain(instances.iter().map(|i| i.template_id))
        .collect();
    let ids: Vec<u32> = ids.into_iter().collect();
    let mut model =
        RecommenderModel::initialized(&ids, config.dim, config.embed_dim, config.seed, config.margin, config.seed)?;
    model.logit_scale = config.logit_scale;
    model.validate()?;

    let data = prepare(instances, &model, &ids)?;
    let mut state = State {
        rows: model.embed_dim,
        logit_scale: model.logit_scale,
        margin: model.margin,
        columns: data.features.iter().map(|&j| model.instance_projection.column(j).into_owned()).collect(),
        embeddings: model.template_embeddings.values().cloned().collect(),
        weights: vec![[0.0; 8]; data.features.len()],
    };

    let mut history = Vec::with_capacity(config.epochs + 1);
    let mut measure = |state: &State, epoch: usize| -> Result<(), RecommenderError> {
        let task1 = state.task1_loss(&data);
        if !task1.is_finite() {
            return Err(RecommenderError::NonFiniteLoss { task: "template selection", epoch });
        }
        let task2 = state.task2_loss(&data);
        if !task2.is_finite() {
            return Err(RecommenderError::NonFiniteLoss { task: "tag prediction", epoch });
        }
        history.push(EpochLosses { epoch, task1, task2 });
        Ok(())
    };
    for epoch in 0..config.epochs {
        measure(&state, epoch)?;
        state.task1_step(&data, config.learning_rate, !config.freeze_template_embeddings);
        state.task2_step(&data, config.learning_rate);
    }
    measure(&state, config.epochs)?;

    for (&j, column) in data.features.iter().zip(state.columns) {
        model.instance_projection.columns.insert(j, column);
    }
    for (id, e) in ids.iter().zip(state.embeddings) {
        model.template_embeddings.insert(*id, e);
    }
    for (&j, w) in data.features.iter().zip(state.weights) {
        if w.iter().any(|v| *v != 0.0) {
            model.tag_weights.insert(j, w);
        }
    }
    Ok(TrainOutcome { model, history })
}

/// Mean cross-entropy of the gold template.
pub fn task1_loss(model: &RecommenderModel, instances: &[TrainingInstance]) -> Result<f64, RecommenderError> {
    let mut total = 0.0;
    for inst in instances {
        let s = model.select_template(&inst.tokens)?;
        let p = s.probabilities.iter().find(|(id, _)| *id == inst.template_id).map_or(0.0, |(_, p)| *p);
        total -= p.ln();
    }
    Ok(total / instances.len() as f64)
}

/// Mean multi-negative hinge loss per token.
pub fn task2_loss(model: &RecommenderModel, instances: &[TrainingInstance]) -> Result<f64, RecommenderError> {
    let mut total = 0.0;
    let mut count = 0usize;
    for inst in instances {
        for (token, tag) in inst.tokens.iter().zip(&inst.tags) {
            let gold = tag.index().ok_or_else(|| RecommenderError::InvalidArgument(format!("tag {tag} is not scored")))?;
            let s = model.tag_scores(&model.features(std::slice::from_ref(token))?);
            total += hinge(&s, gold, model.margin);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Fraction of instances whose selected template is the gold one. Without a
/// model the rule fallback is scored.
pub fn task1_accuracy(model: Option<&RecommenderModel>, instances: &[TrainingInstance]) -> Result<f64, RecommenderError> {
    let mut correct = 0usize;
    for inst in instances {
        let predicted = match model {
            Some(m) => m.select_template(&inst.tokens)?.template_id,
            None => fallback_recommend(&inst.tokens).0,
        };
        correct += usize::from(predicted == inst.template_id);
    }
    Ok(correct as f64 / instances.len() as f64)
}

/// Fraction of tokens whose predicted tag is the gold one. Without a model
/// the rule fallback is scored.
pub fn task2_accuracy(model: Option<&RecommenderModel>, instances: &[TrainingInstance]) -> Result<f64, RecommenderError> {
    let mut correct = 0usize;
    let mut count = 0usize;
    for inst in instances {
        let predicted = match model {
            Some(m) => m.predict_tags(&inst.tokens)?,
            None => fallback_recommend(&inst.tokens).1,
        };
        correct += predicted.iter().zip(&inst.tags).filter(|(p, g)| p == g).count();
        count += inst.tags.len();
    }
    Ok(correct as f64 / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IsoRole, SrlTag};
    use crate::recommender::FeatureToken;

    fn instance(pairs: &[(&str, IsoRole, SrlTag)], template_id: u32) -> TrainingInstance {
        let tokens = FeatureToken::list(pairs.iter().map(|(t, r, _)| (*t, *r))).unwrap();
        TrainingInstance::new(tokens, template_id, pairs.iter().map(|p| p.2.clone()).collect()).unwrap()
    }

    fn small_config() -> TrainConfig {
        TrainConfig { dim: 1 << 12, embed_dim: 16, epochs: 100, seed: 5, template_ids: vec![1, 2], ..Default::default() }
    }

    fn toy_set() -> Vec<TrainingInstance> {
        vec![
            instance(&[("Flight plan", IsoRole::Subject, SrlTag::Arg0), ("UAV", IsoRole::Constraint, SrlTag::ArgmBnf)], 1),
            instance(&[("The pilot", IsoRole::Subject, SrlTag::Arg0), ("upload", IsoRole::Action, SrlTag::Rel)], 1),
            instance(&[("The audit log", IsoRole::Subject, SrlTag::Arg1), ("retained", IsoRole::Action, SrlTag::Rel)], 2),
            instance(&[("Session data", IsoRole::Subject, SrlTag::Arg1), ("within 2 seconds", IsoRole::Constraint, SrlTag::ArgmTmp)], 2),
        ]
    }

    #[test]
    fn repeated_instance_losses_do_not_increase() {
        let inst = toy_set().remove(0);
        let batch = vec![inst.clone(); 4];
        let outcome = train(&batch, &small_config()).unwrap();
        let first = outcome.history[0];
        let last = outcome.final_losses();
        assert!(last.task1 <= first.task1);
        assert!(last.task2 <= first.task2);
        let tags = outcome.model.predict_tags(&inst.tokens).unwrap();
        assert_eq!(tags, inst.tags);
    }

    #[test]
    fn separable_toy_set_reaches_zero_hinge_loss() {
        let set = toy_set();
        let outcome = train(&set, &TrainConfig { epochs: 300, ..small_config() }).unwrap();
        assert_eq!(outcome.final_losses().task2, 0.0);
        assert_eq!(task2_loss(&outcome.model, &set).unwrap(), 0.0);
        assert_eq!(task1_accuracy(Some(&outcome.model), &set).unwrap(), 1.0);
        assert_eq!(task2_accuracy(Some(&outcome.model), &set).unwrap(), 1.0);
    }

    #[test]
    fn frozen_embeddings_give_monotone_task1_curve() {
        let config = TrainConfig { learning_rate: 0.01, freeze_template_embeddings: true, ..small_config() };
        let outcome = train(&toy_set(), &config).unwrap();
        for pair in outcome.history.windows(2) {
            assert!(pair[1].task1 <= pair[0].task1 + 1e-12, "{pair:?}");
        }
    }

    #[test]
    fn history_matches_direct_loss_evaluation() {
        let set = toy_set();
        let outcome = train(&set, &small_config()).unwrap();
        let last = outcome.final_losses();
        assert!((task1_loss(&outcome.model, &set).unwrap() - last.task1).abs() < 1e-9);
        assert!((task2_loss(&outcome.model, &set).unwrap() - last.task2).abs() < 1e-9);
    }

    #[test]
    fn training_is_deterministic() {
        let a = train(&toy_set(), &small_config()).unwrap().model.to_json();
        let b = train(&toy_set(), &small_config()).unwrap().model.to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn non_finite_loss_aborts() {
        let config = TrainConfig { learning_rate: 1e308, ..small_config() };
        let err = train(&toy_set(), &config).unwrap_err();
        assert!(matches!(err, RecommenderError::NonFiniteLoss { .. }), "{err}");
    }

    #[test]
    fn rejects_empty_input() {
        assert!(train(&[], &small_config()).is_err());
    }
}
