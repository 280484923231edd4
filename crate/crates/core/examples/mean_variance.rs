//! Variance of the subset mean WER: simple random sampling against
//! stratified sampling on a bimodal population.

use cowerage::pruning::PruningFraction;
use cowerage::simulation::{
    simulate_mean_variance, MeanVarianceConfig, SimulationReport, SyntheticDistribution,
};

fn main() -> cowerage::Result<()> {
    let dist = SyntheticDistribution::equal_mixture(&[(0.2, 0.04), (0.8, 0.04)])?;
    let config = MeanVarianceConfig {
        population: 2000,
        fraction: PruningFraction::new(9, 10)?,
        bucket_size: 1000,
        trials: 20_000,
        seed: 3,
        with_replacement: true,
    };
    let report = simulate_mean_variance(&dist, &config)?;
    let ratio = report.empirical_var_random / report.empirical_var_cowerage;
    println!("{}", SimulationReport::MeanVariance(report).to_table());
    println!("random / stratified variance: {ratio:.1}x");
    Ok(())
}
