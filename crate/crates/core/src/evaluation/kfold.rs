use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::EvaluationError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fold<T> {
    pub index: usize,
    /// Training ids in input order.
    pub train: Vec<T>,
    pub test: Vec<T>,
}

/// Shuffles ids with `seed` and cuts them into `k` test folds; the first
/// `len % k` folds take one extra id.
pub fn kfold_split<T: Clone + PartialEq>(ids: &[T], k: usize, seed: u64) -> Result<Vec<Fold<T>>, EvaluationError> {
    if k < 2 {
        return Err(EvaluationError::InvalidArgument(format!("k = {k}, at least 2 folds needed")));
    }
    if ids.len() < k {
        return Err(EvaluationError::InvalidArgument(format!("{} id(s) cannot fill {k} folds", ids.len())));
    }
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (ids.len() / k, ids.len() % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for index in 0..k {
        let size = base + usize::from(index < extra);
        let mut in_test = vec![false; ids.len()];
        for &i in &order[start..start + size] {
            in_test[i] = true;
        }
        folds.push(Fold {
            index,
            train: (0..ids.len()).filter(|&i| !in_test[i]).map(|i| ids[i].clone()).collect(),
            test: order[start..start + size].iter().map(|&i| ids[i].clone()).collect(),
        });
        start += size;
    }
    Ok(folds)
}
