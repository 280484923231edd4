//! Every selection strategy on the same synthetic score matrix.

use cowerage::pruning::{prune, BucketMode, PruneConfig, PruningFraction, Strategy};
use cowerage::scores::ScoreMatrix;

fn main() -> cowerage::Result<()> {
    let ids: Vec<String> = (0..20).map(|i| format!("ex{i:02}")).collect();
    // a skewed spread: most examples are easy, a few are very hard
    let scores = ScoreMatrix::from_decimals(
        ids.iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), ((i * i) % 23) as f64 / 25.0)),
    )?;
    let fraction = PruningFraction::new(3, 4)?;

    for strategy in [
        Strategy::Random,
        Strategy::TopK,
        Strategy::BottomK,
        Strategy::Cowerage,
    ] {
        let config = PruneConfig::cowerage(fraction, 4, 42).with_strategy(strategy);
        let subset = prune(&scores, &config)?;
        let mean: f64 = subset
            .selected_ids
            .iter()
            .map(|id| scores.get(id).unwrap().to_f64())
            .sum::<f64>()
            / subset.len() as f64;
        println!(
            "{:<10} mean WER {mean:.3}  {:?}",
            strategy.name(),
            subset.selected_ids
        );
    }

    let equal_width = PruneConfig {
        bucket_mode: BucketMode::EqualWidth,
        ..PruneConfig::cowerage(fraction, 4, 42)
    };
    println!(
        "equal-width buckets: {:?}",
        prune(&scores, &equal_width)?.selected_ids
    );

    let window = PruneConfig {
        offset: 2,
        ..PruneConfig::cowerage(fraction, 4, 0).with_strategy(Strategy::OffsetWindow)
    };
    println!(
        "skip the 2 hardest: {:?}",
        prune(&scores, &window)?.selected_ids
    );
    Ok(())
}
