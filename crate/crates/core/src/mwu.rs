//! Two-sided Mann-Whitney U test.
//!
//! Ranks use midranks for ties. For small tie-free samples the p-value comes
//! from the exact null distribution of U (the number of ways to place the
//! first sample's ranks among all ranks); otherwise from the normal
//! approximation with tie-corrected variance and a continuity correction.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest combined sample size for which the exact distribution is used.
pub const EXACT_MAX_TOTAL: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MwuMethod {
    Exact,
    NormalApprox,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MwuResult {
    /// `min(U_A, U_B)`.
    pub u: f64,
    pub u_a: f64,
    pub u_b: f64,
    pub p_value: f64,
    pub method: MwuMethod,
    pub n_a: usize,
    pub n_b: usize,
}

/// Midranks (1-based) of `values`.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share the average of ranks i+1..=j
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// Sizes of the tie groups in `values`.
fn tie_groups(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        groups.push(j - i);
        i = j;
    }
    groups
}

/// Null distribution of U for tie-free samples: `counts[u]` is the number of
/// rank assignments giving `U = u`, out of `C(n_a + n_b, n_a)`.
pub fn exact_u_counts(n_a: usize, n_b: usize) -> Vec<f64> {
    // table[m][u] for the current n, built up over n = 0..=n_b using
    // f(u; m, n) = f(u - n; m - 1, n) + f(u; m, n - 1)
    let max_u = n_a * n_b;
    let mut prev: Vec<Vec<f64>> = (0..=n_a)
        .map(|_| {
            let mut row = vec![0.0; max_u + 1];
            row[0] = 1.0;
            row
        })
        .collect();
    for n in 1..=n_b {
        let mut next = vec![vec![0.0; max_u + 1]; n_a + 1];
        next[0][0] = 1.0;
        for m in 1..=n_a {
            for u in 0..=m * n {
                let with_top = if u >= n { next[m - 1][u - n] } else { 0.0 };
                next[m][u] = with_top + prev[m][u];
            }
        }
        prev = next;
    }
    prev.swap_remove(n_a)
}

/// Exact two-sided p-value for statistic `u = min(U_A, U_B)`.
pub fn exact_p_value(u: f64, n_a: usize, n_b: usize) -> f64 {
    let counts = exact_u_counts(n_a, n_b);
    let total: f64 = counts.iter().sum();
    let lower: f64 = counts
        .iter()
        .enumerate()
        .take_while(|(k, _)| (*k as f64) <= u + 1e-9)
        .map(|(_, c)| c)
        .sum();
    (2.0 * lower / total).min(1.0)
}

/// Normal-approximation two-sided p-value with tie correction and a 0.5
/// continuity correction.
pub fn normal_p_value(u: f64, n_a: usize, n_b: usize, ties: &[usize]) -> f64 {
    let (na, nb) = (n_a as f64, n_b as f64);
    let n = na + nb;
    let mean = na * nb / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>();
    let variance = if n > 1.0 {
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::standard();
    (2.0 * normal.sf(z)).min(1.0)
}

pub fn mann_whitney_u(sample_a: &[f64], sample_b: &[f64]) -> Result<MwuResult> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::Empty("Mann-Whitney U needs two non-empty samples"));
    }
    if sample_a.iter().chain(sample_b).any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("NaN in Mann-Whitney sample".into()));
    }
    let (n_a, n_b) = (sample_a.len(), sample_b.len());
    let combined: Vec<f64> = sample_a.iter().chain(sample_b).copied().collect();
    let ranks = midranks(&combined);
    let rank_sum_a: f64 = ranks[..n_a].iter().sum();
    let u_a = rank_sum_a - (n_a * (n_a + 1)) as f64 / 2.0;
    let u_b = (n_a * n_b) as f64 - u_a;
    let u = u_a.min(u_b);
    let ties = tie_groups(&combined);
    let tie_free = ties.iter().all(|&t| t == 1);
    let (p_value, method) = if tie_free && n_a + n_b <= EXACT_MAX_TOTAL {
        (exact_p_value(u, n_a, n_b), MwuMethod::Exact)
    } else {
        (normal_p_value(u, n_a, n_b, &ties), MwuMethod::NormalApprox)
    };
    Ok(MwuResult {
        u,
        u_a,
        u_b,
        p_value,
        method,
        n_a,
        n_b,
    })
}
