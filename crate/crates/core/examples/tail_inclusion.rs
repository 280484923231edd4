//! How often random and cowerage subsets keep an outlier example.

use cowerage::pruning::{BucketMode, PruningFraction};
use cowerage::simulation::{
    simulate_tail_inclusion, SimulationReport, SyntheticDistribution, TailInclusionConfig,
};

fn main() -> cowerage::Result<()> {
    let dist = SyntheticDistribution::single_outlier(99, 0.0, 10.0);
    for mode in [BucketMode::EqualCount, BucketMode::EqualWidth] {
        let config = TailInclusionConfig {
            population: 0,
            fraction: PruningFraction::new(9, 10)?,
            k: 2.0,
            bucket_size: 10,
            bucket_mode: mode,
            trials: 10_000,
            seed: 1,
        };
        let report = simulate_tail_inclusion(&dist, &config)?;
        println!("{mode:?} buckets");
        println!("{}", SimulationReport::TailInclusion(report).to_table());
    }
    Ok(())
}
