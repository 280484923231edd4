use rand::seq::index;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pruning::{
    stream_rng, BucketMode, PruneConfig, PruningFraction, RankOrder, RankedExamples,
    StratifiedPlan, WithinBucket,
};
use crate::score::Score;
use crate::simulation::distribution::SyntheticDistribution;
use crate::simulation::stats::{mean, population_variance};

/// Chebyshev-based upper bound on the chance that `n` independent draws
/// include at least one example at least `k` standard deviations above the
/// mean: `1 - (1 - min(1, 1/k^2))^n`.
pub fn tail_bound(k: f64, n: usize) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidConfig(format!("k must be positive, got {k}")));
    }
    let q = (1.0 / (k * k)).min(1.0);
    let n = i32::try_from(n).map_err(|_| Error::InvalidConfig("n too large".into()))?;
    Ok(1.0 - (1.0 - q).powi(n))
}

#[derive(Clone, Debug)]
pub struct TailInclusionConfig {
    /// Population size (ignored for empirical distributions).
    pub population: usize,
    pub fraction: PruningFraction,
    pub k: f64,
    pub bucket_size: usize,
    pub bucket_mode: BucketMode,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailInclusionReport {
    pub trials: usize,
    pub population: usize,
    pub retained: usize,
    pub k: f64,
    pub threshold: f64,
    pub tail_count: usize,
    pub bucket_mode: BucketMode,
    pub bucket_count: usize,
    /// Share of random subsets containing a tail example.
    pub empirical_tail_prob: f64,
    pub empirical_tail_prob_se: f64,
    /// Share of cowerage subsets containing a tail example.
    pub cowerage_tail_prob: f64,
    pub cowerage_tail_prob_se: f64,
    /// [`tail_bound`] at the retained size.
    pub analytic_bound: f64,
}

/// Ids that sort in population order.
pub(crate) fn population_ranking(values: &[f64]) -> Result<(RankedExamples, Vec<usize>)> {
    let width = values.len().to_string().len();
    let pairs = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let score = Score::from_f64_exact(v)
                .ok_or_else(|| Error::InvalidConfig(format!("non-finite score {v}")))?;
            Ok((format!("{i:0width$}"), score))
        })
        .collect::<Result<Vec<_>>>()?;
    let ranked = RankedExamples::from_pairs(pairs, RankOrder::Descending)?;
    let index = ranked
        .ids()
        .map(|id| id.parse().expect("ids are indices"))
        .collect();
    Ok((ranked, index))
}

/// Independent per-trial seeds derived from `seed`.
pub(crate) fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    let mut master = stream_rng(seed, u64::MAX - 1);
    (0..trials).map(|_| master.next_u64()).collect()
}

fn proportion_se(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Monte Carlo estimate of how often random and cowerage subsets include an
/// example from the upper tail `score >= mean + k * sd` of the population.
pub fn simulate_tail_inclusion(
    dist: &SyntheticDistribution,
    config: &TailInclusionConfig,
) -> Result<TailInclusionReport> {
    if config.trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    let values = dist.population(config.population, config.seed)?;
    if values.is_empty() {
        return Err(Error::Empty("population"));
    }
    let n = values.len();
    let mu = mean(&values);
    let sigma = population_variance(&values).sqrt();
    let threshold = mu + config.k * sigma;
    // with zero spread nothing lies above the mean, so the tail is empty
    let is_tail: Vec<bool> = values.iter().map(|&v| v >= threshold && v > mu).collect();
    let tail_count = is_tail.iter().filter(|&&t| t).count();
    if tail_count == 0 {
        return Err(Error::EmptyTail);
    }

    let (ranked, index) = population_ranking(&values)?;
    let prune = PruneConfig {
        bucket_mode: config.bucket_mode,
        ..PruneConfig::cowerage(config.fraction, config.bucket_size, config.seed)
    };
    let plan = StratifiedPlan::new(&ranked, &prune)?;
    let retained = config.fraction.retain_size(n);
    let tail_at_position: Vec<bool> = index.iter().map(|&i| is_tail[i]).collect();

    let hits: Vec<(bool, bool)> = trial_seeds(config.seed, config.trials)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(s, u64::MAX);
            let random = index::sample(&mut rng, n, retained)
                .into_iter()
                .any(|i| is_tail[i]);
            let cow = plan
                .sample_positions(WithinBucket::Random, s)
                .into_iter()
                .any(|p| tail_at_position[p]);
            (random, cow)
        })
        .collect();
    let t = config.trials as f64;
    let random = hits.iter().filter(|h| h.0).count() as f64 / t;
    let cow = hits.iter().filter(|h| h.1).count() as f64 / t;
    Ok(TailInclusionReport {
        trials: config.trials,
        population: n,
        retained,
        k: config.k,
        threshold,
        tail_count,
        bucket_mode: config.bucket_mode,
        bucket_count: plan.partition().len(),
        empirical_tail_prob: random,
        empirical_tail_prob_se: proportion_se(random, config.trials),
        cowerage_tail_prob: cow,
        cowerage_tail_prob_se: proportion_se(cow, config.trials),
        analytic_bound: tail_bound(config.k, retained)?,
    })
}
