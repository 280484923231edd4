use std::ops::Range;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pruning::{
    allocate_counts, partition_buckets, stream_rng, BucketMode, PruneConfig, PruningFraction,
    StratifiedPlan, WithinBucket,
};
use crate::simulation::distribution::SyntheticDistribution;
use crate::simulation::stats::{
    compensated_sum, jackknife_se, mean, population_variance, sample_variance,
};
use crate::simulation::tail::{population_ranking, trial_seeds};

const JACKKNIFE_BLOCKS: usize = 20;

#[derive(Clone, Debug)]
pub struct MeanVarianceConfig {
    /// Population size (ignored for empirical distributions).
    pub population: usize,
    pub fraction: PruningFraction,
    pub bucket_size: usize,
    pub trials: usize,
    pub seed: u64,
    /// Draw with replacement inside each stratum (and for random subsets).
    pub with_replacement: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanVarianceReport {
    pub trials: usize,
    pub population: usize,
    pub retained: usize,
    pub strata: usize,
    pub stratum_sizes: Vec<usize>,
    pub stratum_counts: Vec<usize>,
    /// Strata are the same size and the retained count splits evenly, which
    /// is when the closed forms below are exact.
    pub equal_occupancy: bool,
    pub with_replacement: bool,
    pub empirical_var_random: f64,
    pub empirical_var_random_se: f64,
    pub empirical_var_cowerage: f64,
    pub empirical_var_cowerage_se: f64,
    /// `sum_j ((mu_j - mu)^2 + sigma_j^2) / (M N)`
    pub analytic_var_random: f64,
    /// `sum_j sigma_j^2 / (M N)`
    pub analytic_var_cowerage: f64,
    /// `sum_j (mu_j - mu)^2 / (M N)`
    pub analytic_gap: f64,
}

/// Closed-form variances of the subset mean for `retained` draws from the
/// given strata, with equal-weight strata and `retained / M` draws each.
pub fn analytic_variances(strata: &[Vec<f64>], retained: usize) -> (f64, f64, f64) {
    let all: Vec<f64> = strata.iter().flatten().copied().collect();
    let mu = mean(&all);
    let scale = (strata.len() * retained) as f64;
    let within = compensated_sum(strata.iter().map(|s| population_variance(s))) / scale;
    let between = compensated_sum(strata.iter().map(|s| (mean(s) - mu).powi(2))) / scale;
    (within + between, within, between)
}

fn draw_mean<R: Rng>(
    rng: &mut R,
    values: &[f64],
    spans: &[Range<usize>],
    counts: &[usize],
    with_replacement: bool,
) -> f64 {
    let mut picked = Vec::with_capacity(counts.iter().sum());
    for (span, &count) in spans.iter().zip(counts) {
        if with_replacement {
            picked.extend((0..count).map(|_| values[rng.random_range(span.clone())]));
        } else {
            picked.extend(
                index::sample(rng, span.len(), count)
                    .into_iter()
                    .map(|i| values[span.start + i]),
            );
        }
    }
    mean(&picked)
}

/// Monte Carlo variance of the subset mean under random and cowerage
/// selection, next to the closed forms. Cowerage uses equal-width strata.
pub fn simulate_mean_variance(
    dist: &SyntheticDistribution,
    config: &MeanVarianceConfig,
) -> Result<MeanVarianceReport> {
    if config.trials < 2 {
        return Err(Error::InvalidConfig("need at least two trials".into()));
    }
    let population = dist.population(config.population, config.seed)?;
    if population.is_empty() {
        return Err(Error::Empty("population"));
    }
    let n = population.len();
    let (ranked, index) = population_ranking(&population)?;
    // values in descending-rank order, so strata are contiguous spans
    let values: Vec<f64> = index.iter().map(|&i| population[i]).collect();

    let prune = PruneConfig {
        bucket_mode: BucketMode::EqualWidth,
        ..PruneConfig::cowerage(config.fraction, config.bucket_size, config.seed)
    };
    let bucket_size = prune.effective_bucket_size(n)?;
    let partition = partition_buckets(&ranked, bucket_size, BucketMode::EqualWidth)?;
    let spans = partition.spans().to_vec();
    let sizes = partition.sizes();
    let m = spans.len();
    let retained = config.fraction.retain_size(n);
    if retained < m {
        return Err(Error::Degenerate(format!(
            "{retained} retained examples cannot cover {m} strata"
        )));
    }
    let counts = allocate_counts(&sizes, config.fraction);
    let plan = StratifiedPlan::from_partition(ranked, partition, config.fraction)?;

    let strata: Vec<Vec<f64>> = spans.iter().map(|s| values[s.clone()].to_vec()).collect();
    let (var_random, var_cow, gap) = analytic_variances(&strata, retained);
    let equal_occupancy = sizes.iter().all(|&s| s == sizes[0]) && retained.is_multiple_of(m);

    let everything = 0..n;
    let whole = std::slice::from_ref(&everything);
    let draws: Vec<(f64, f64)> = trial_seeds(config.seed, config.trials)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(s, u64::MAX);
            let random = draw_mean(
                &mut rng,
                &values,
                whole,
                &[retained],
                config.with_replacement,
            );
            let cow = if config.with_replacement {
                draw_mean(&mut rng, &values, &spans, &counts, true)
            } else {
                let picked: Vec<f64> = plan
                    .sample_positions(WithinBucket::Random, s)
                    .into_iter()
                    .map(|p| values[p])
                    .collect();
                mean(&picked)
            };
            (random, cow)
        })
        .collect();
    let random_means: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let cow_means: Vec<f64> = draws.iter().map(|d| d.1).collect();

    Ok(MeanVarianceReport {
        trials: config.trials,
        population: n,
        retained,
        strata: m,
        stratum_sizes: sizes,
        stratum_counts: counts,
        equal_occupancy,
        with_replacement: config.with_replacement,
        empirical_var_random: sample_variance(&random_means),
        empirical_var_random_se: jackknife_se(&random_means, JACKKNIFE_BLOCKS, sample_variance),
        empirical_var_cowerage: sample_variance(&cow_means),
        empirical_var_cowerage_se: jackknife_se(&cow_means, JACKKNIFE_BLOCKS, sample_variance),
        analytic_var_random: var_random,
        analytic_var_cowerage: var_cow,
        analytic_gap: gap,
    })
}
