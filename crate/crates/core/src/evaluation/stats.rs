use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::EvaluationError;

/// Largest pooled sample size for which the exact null distribution is
/// enumerated.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatTestResult {
    /// U of the first sample.
    pub u_statistic: f64,
    /// One-tailed p for "first sample is stochastically larger".
    pub p_value: f64,
    /// Holm-adjusted p; equals `p_value` until [`holm_adjust`] is applied
    /// across a family of tests.
    pub p_holm: f64,
    /// `None` when the pooled variance is zero.
    pub cohens_d: Option<f64>,
    pub direction: String,
    pub exact: bool,
}

/// Midranks (1-based) of `values`.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn u_of_first(ranks: &[f64], n_a: usize) -> f64 {
    ranks[..n_a].iter().sum::<f64>() - (n_a * (n_a + 1)) as f64 / 2.0
}

fn check(a: &[f64], b: &[f64]) -> Result<(), EvaluationError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvaluationError::InvalidArgument("both samples must be non-empty".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(EvaluationError::InvalidArgument("samples contain non-finite values".into()));
    }
    Ok(())
}

/// Exact one-tailed p: the share of all assignments of the pooled midranks
/// to the first sample whose U is at least the observed one.
pub fn mann_whitney_exact_p(a: &[f64], b: &[f64]) -> Result<f64, EvaluationError> {
    check(a, b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let n_a = a.len();
    let observed = u_of_first(&ranks, n_a);
    let offset = (n_a * (n_a + 1)) as f64 / 2.0;
    let mut at_least = 0u64;
    let mut total = 0u64;
    let mut chosen = Vec::with_capacity(n_a);
    fn walk(ranks: &[f64], start: usize, left: usize, chosen: &mut Vec<f64>, visit: &mut dyn FnMut(f64)) {
        if left == 0 {
            visit(chosen.iter().sum());
            return;
        }
        for i in start..=ranks.len() - left {
            chosen.push(ranks[i]);
            walk(ranks, i + 1, left - 1, chosen, visit);
            chosen.pop();
        }
    }
    walk(&ranks, 0, n_a, &mut chosen, &mut |rank_sum| {
        total += 1;
        if rank_sum - offset >= observed - 1e-9 {
            at_least += 1;
        }
    });
    Ok(at_least as f64 / total as f64)
}

/// Normal approximation with tie and continuity correction. A degenerate
/// (all tied) sample gives p = 1.
pub fn mann_whitney_normal_p(a: &[f64], b: &[f64]) -> Result<f64, EvaluationError> {
    check(a, b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let (n_a, n_b) = (a.len() as f64, b.len() as f64);
    let n = n_a + n_b;
    let u = u_of_first(&ranks, a.len());
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|v| **v == sorted[i]).count();
        tie_term += (j * j * j - j) as f64;
        i += j;
    }
    let variance = n_a * n_b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)).max(1.0));
    if !(variance > 0.0) {
        return Ok(1.0);
    }
    let z = (u - n_a * n_b / 2.0 - 0.5) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok((1.0 - normal.cdf(z)).clamp(0.0, 1.0))
}

/// One-tailed Mann-Whitney U test of "a > b", exact when the pooled size is
/// at most [`EXACT_LIMIT`].
pub fn mann_whitney_one_tailed(a: &[f64], b: &[f64]) -> Result<StatTestResult, EvaluationError> {
    check(a, b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let u = u_of_first(&midranks(&pooled), a.len());
    let exact = a.len() + b.len() <= EXACT_LIMIT;
    let p = if exact { mann_whitney_exact_p(a, b)? } else { mann_whitney_normal_p(a, b)? };
    Ok(StatTestResult {
        u_statistic: u,
        p_value: p,
        p_holm: p,
        cohens_d: cohens_d(a, b).ok(),
        direction: "first > second".into(),
        exact,
    })
}

/// Holm step-down adjustment, returned in input order.
pub fn holm_adjust(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let mut adjusted = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        running = running.max(((m - rank) as f64 * p_values[i]).min(1.0));
        adjusted[i] = running;
    }
    adjusted
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// (mean_a - mean_b) / pooled standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, EvaluationError> {
    check(a, b)?;
    let dof = a.len() + b.len();
    if dof < 3 {
        return Err(EvaluationError::Undefined("Cohen's d needs at least three observations".into()));
    }
    let ss = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    };
    let pooled = ((ss(a) + ss(b)) / (dof - 2) as f64).sqrt();
    if pooled == 0.0 {
        return Err(EvaluationError::Undefined("pooled variance is zero".into()));
    }
    Ok((mean(a) - mean(b)) / pooled)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_small_sample() {
        let r = mann_whitney_one_tailed(&[3.0, 4.0, 5.0], &[1.0, 2.0]).unwrap();
        assert!(r.exact);
        assert_eq!(r.u_statistic, 6.0);
        assert_eq!(r.p_value, 0.1);
        let reverse = mann_whitney_one_tailed(&[1.0, 2.0], &[3.0, 4.0, 5.0]).unwrap();
        assert_eq!(reverse.p_value, 1.0);
    }

    #[test]
    fn midranks_share_ties() {
        assert_eq!(midranks(&[2.0, 1.0, 2.0, 3.0]), [2.5, 1.0, 2.5, 4.0]);
    }

    #[test]
    fn holm_hand_example() {
        let adjusted = holm_adjust(&[0.01, 0.04, 0.03]);
        for (got, want) in adjusted.iter().zip([0.03, 0.06, 0.06]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(holm_adjust(&[]).is_empty());
        assert_eq!(holm_adjust(&[0.6, 0.7]), [1.0, 1.0]);
    }

    #[test]
    fn identical_samples_are_near_half() {
        let a: Vec<f64> = (0..40).map(|i| (i * 7 % 13) as f64).collect();
        let r = mann_whitney_one_tailed(&a, &a).unwrap();
        assert!(!r.exact);
        assert!((r.p_value - 0.5).abs() < 0.05, "{}", r.p_value);
        let small = mann_whitney_one_tailed(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((small.p_value - 0.5).abs() < 0.2);
    }

    #[test]
    fn all_tied_normal_path_is_one() {
        assert_eq!(mann_whitney_normal_p(&[1.0; 10], &[1.0; 10]).unwrap(), 1.0);
    }

    #[test]
    fn cohens_d_hand_computed() {
        // Means 2 and 5, pooled variance (2 + 2) / 4 = 1.
        assert!((cohens_d(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap() + 3.0).abs() < 1e-12);
        assert!(cohens_d(&[1.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn empty_samples_are_rejected() {
        assert!(mann_whitney_one_tailed(&[], &[1.0]).is_err());
    }
}
