//! Subset selection strategies.
//!
//! All strategies keep `round_half_up((1 - p) * N)` examples (at least one).
//! Extremal and window strategies work on the descending ranking so that
//! "top" and "bottom" are complementary slices of one total order.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifest::DatasetManifest;
use crate::pruning::buckets::{partition_buckets, BucketPartition};
use crate::pruning::config::{Extremal, PruneConfig, Strategy, WithinBucket};
use crate::pruning::fraction::PruningFraction;
use crate::pruning::rank::{RankOrder, RankedExamples};
use crate::pruning::subset::{Provenance, SubsetManifest};
use crate::score::Score;
use crate::scores::ScoreMatrix;

/// Deterministic generator for stream `stream` of `seed`. Streams of one seed
/// are independent, so per-bucket draws do not depend on processing order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn ids_at(ranked: &RankedExamples, positions: impl IntoIterator<Item = usize>) -> Vec<String> {
    positions
        .into_iter()
        .map(|i| ranked.entries()[i].id.clone())
        .collect()
}

/// Keeps the `retain_size` highest (`Top`) or lowest (`Bottom`) scoring
/// examples.
pub fn select_extremal(
    ranked: &RankedExamples,
    fraction: PruningFraction,
    which: Extremal,
) -> Result<SubsetManifest> {
    if ranked.is_empty() {
        return Err(Error::Empty("no examples to select from"));
    }
    let desc = ranked.reordered(RankOrder::Descending);
    let n = desc.len();
    let keep = fraction.retain_size(n);
    let (positions, strategy): (Vec<usize>, _) = match which {
        Extremal::Top => ((0..keep).collect(), Strategy::TopK),
        Extremal::Bottom => ((n - keep..n).rev().collect(), Strategy::BottomK),
    };
    let config = PruneConfig {
        strategy,
        fraction,
        ..Default::default()
    };
    Ok(SubsetManifest::new(
        ids_at(&desc, positions),
        Provenance::new(&config, false),
    ))
}

/// Uniform sample without replacement; ids keep their input order.
pub fn select_random<S: AsRef<str>>(
    ids: &[S],
    fraction: PruningFraction,
    seed: u64,
) -> SubsetManifest {
    let keep = fraction.retain_size(ids.len());
    let mut rng = stream_rng(seed, 0);
    let mut picked = index::sample(&mut rng, ids.len(), keep).into_vec();
    picked.sort_unstable();
    let config = PruneConfig {
        strategy: Strategy::Random,
        fraction,
        seed,
        ..Default::default()
    };
    SubsetManifest::new(
        picked
            .into_iter()
            .map(|i| ids[i].as_ref().to_owned())
            .collect(),
        Provenance::new(&config, true),
    )
}

/// Per-bucket sample counts: `floor((1 - p) * |bucket|)` for each bucket,
/// then the shortfall to the global retain size handed out one at a time in
/// bucket order, skipping buckets that are already exhausted.
pub fn allocate_counts(sizes: &[usize], fraction: PruningFraction) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    let target = fraction.retain_size(total);
    let mut counts: Vec<usize> = sizes.iter().map(|&s| fraction.retain_floor(s)).collect();
    let mut deficit = target - counts.iter().sum::<usize>();
    while deficit > 0 {
        let mut progressed = false;
        for (count, &size) in counts.iter_mut().zip(sizes) {
            if deficit == 0 {
                break;
            }
            if *count < size {
                *count += 1;
                deficit -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    counts
}

/// Buckets and per-bucket counts for one cowerage run. Sampling from a plan
/// only varies the within-bucket choices; the strata are fixed.
#[derive(Clone, Debug)]
pub struct StratifiedPlan {
    ranked: RankedExamples,
    partition: BucketPartition,
    counts: Vec<usize>,
}

impl StratifiedPlan {
    pub fn new(ranked: &RankedExamples, config: &PruneConfig) -> Result<Self> {
        let ranked = ranked.reordered(RankOrder::Descending);
        let bucket_size = config.effective_bucket_size(ranked.len())?;
        let partition = partition_buckets(&ranked, bucket_size, config.bucket_mode)?;
        Self::from_partition(ranked, partition, config.fraction)
    }

    /// Plan over an explicit partition of `ranked` (which must be
    /// descending).
    pub fn from_partition(
        ranked: RankedExamples,
        partition: BucketPartition,
        fraction: PruningFraction,
    ) -> Result<Self> {
        if ranked.order() != RankOrder::Descending {
            return Err(Error::InvalidConfig(
                "cowerage plans need a descending ranking".into(),
            ));
        }
        let counts = allocate_counts(&partition.sizes(), fraction);
        let pruned = ranked.len() - fraction.retain_size(ranked.len());
        if !fraction.is_zero() && partition.len() > pruned.max(1) {
            log::warn!(
                "{} buckets exceed the {} pruned examples; consider a larger bucket size",
                partition.len(),
                pruned
            );
        }
        Ok(StratifiedPlan {
            ranked,
            partition,
            counts,
        })
    }

    pub fn ranked(&self) -> &RankedExamples {
        &self.ranked
    }

    pub fn partition(&self) -> &BucketPartition {
        &self.partition
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Selected ranking positions, ascending. Bucket `i` draws from stream
    /// `i` of `seed` in random mode.
    pub fn sample_positions(&self, mode: WithinBucket, seed: u64) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.counts.iter().sum());
        for (i, (span, &count)) in self.partition.spans().iter().zip(&self.counts).enumerate() {
            match mode {
                WithinBucket::Top => out.extend(span.start..span.start + count),
                WithinBucket::Bottom => out.extend(span.end - count..span.end),
                WithinBucket::Random => {
                    let mut rng = stream_rng(seed, i as u64);
                    let mut picked = index::sample(&mut rng, span.len(), count).into_vec();
                    picked.sort_unstable();
                    out.extend(picked.into_iter().map(|p| span.start + p));
                }
            }
        }
        out
    }

    pub fn sample(&self, mode: WithinBucket, seed: u64) -> Vec<String> {
        ids_at(&self.ranked, self.sample_positions(mode, seed))
    }
}

/// Stratified selection: bucket the descending ranking, then draw from each
/// bucket its allotted count.
pub fn cowerage(ranked: &RankedExamples, config: &PruneConfig) -> Result<SubsetManifest> {
    let plan = StratifiedPlan::new(ranked, config)?;
    let ids = plan.sample(config.within_bucket, config.seed);
    Ok(SubsetManifest::new(
        ids,
        Provenance::new(config, config.within_bucket == WithinBucket::Random),
    ))
}

/// Skips the `offset` highest-scoring examples and keeps the next `window`.
pub fn select_offset_window(
    ranked: &RankedExamples,
    offset: usize,
    window: usize,
) -> Result<SubsetManifest> {
    let n = ranked.len();
    if window == 0 || offset + window > n {
        return Err(Error::WindowOutOfRange {
            offset,
            window,
            len: n,
        });
    }
    let desc = ranked.reordered(RankOrder::Descending);
    let config = PruneConfig {
        strategy: Strategy::OffsetWindow,
        offset,
        window: Some(window),
        ..Default::default()
    };
    Ok(SubsetManifest::new(
        ids_at(&desc, offset..offset + window),
        Provenance::new(&config, false),
    ))
}

/// Character count of each example's raw reference text.
pub fn score_by_length(manifest: &DatasetManifest) -> Result<ScoreMatrix> {
    let scores: BTreeMap<String, Score> = manifest
        .entries()
        .iter()
        .map(|e| {
            (
                e.id.clone(),
                Score::from_integer(e.text.chars().count() as u64),
            )
        })
        .collect();
    ScoreMatrix::new(0, 1, scores)
}

/// Runs the configured strategy. For [`Strategy::LengthCowerage`] `scores`
/// must already hold lengths (see [`score_by_length`]).
pub fn prune(scores: &ScoreMatrix, config: &PruneConfig) -> Result<SubsetManifest> {
    let ranked = RankedExamples::from_pairs(
        scores.scores().iter().map(|(k, v)| (k.clone(), v.clone())),
        RankOrder::Descending,
    )?;
    let subset = match config.strategy {
        Strategy::Random => {
            let ids: Vec<&str> = scores.ids().collect();
            select_random(&ids, config.fraction, config.seed)
        }
        Strategy::TopK => select_extremal(&ranked, config.fraction, Extremal::Top)?,
        Strategy::BottomK => select_extremal(&ranked, config.fraction, Extremal::Bottom)?,
        Strategy::Cowerage | Strategy::LengthCowerage => cowerage(&ranked, config)?,
        Strategy::OffsetWindow => {
            let window = config
                .window
                .unwrap_or_else(|| config.fraction.retain_size(ranked.len()));
            select_offset_window(&ranked, config.offset, window)?
        }
    };
    let mut provenance = subset.provenance;
    provenance.strategy = config.strategy;
    provenance.config = config.clone();
    Ok(SubsetManifest::new(subset.selected_ids, provenance).with_source_epoch(Some(scores.epoch)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ManifestEntry;
    use crate::pruning::rank::rank_examples;
    use std::collections::HashSet;

    fn frac(n: u64, d: u64) -> PruningFraction {
        PruningFraction::new(n, d).unwrap()
    }

    fn matrix(n: usize) -> ScoreMatrix {
        let ids: Vec<String> = (0..n).map(|i| format!("e{i:03}")).collect();
        ScoreMatrix::from_decimals(
            ids.iter()
                .enumerate()
                .map(|(i, id)| (id.as_str(), i as f64 / 100.0)),
        )
        .unwrap()
    }

    fn ranked(n: usize) -> RankedExamples {
        rank_examples(&matrix(n), RankOrder::Descending).unwrap()
    }

    #[test]
    fn top_and_bottom() {
        let r = ranked(10);
        let top = select_extremal(&r, frac(7, 10), Extremal::Top).unwrap();
        assert_eq!(top.selected_ids, ["e009", "e008", "e007"]);
        let all = select_extremal(&r, PruningFraction::ZERO, Extremal::Top).unwrap();
        assert_eq!(all.len(), 10);
        let bottom = select_extremal(&r, frac(3, 10), Extremal::Bottom).unwrap();
        assert_eq!(bottom.len(), 7);
        let union: HashSet<_> = top
            .selected_ids
            .iter()
            .chain(&bottom.selected_ids)
            .collect();
        assert_eq!(union.len(), 10);
    }

    #[test]
    fn complement_holds_across_tied_cut() {
        // a and c tie; top keeps one of them, bottom must keep the other
        let m = ScoreMatrix::from_decimals([("a", 0.3), ("b", 0.1), ("c", 0.3)]).unwrap();
        let asc = rank_examples(&m, RankOrder::Ascending).unwrap();
        let top = select_extremal(&asc, frac(2, 3), Extremal::Top).unwrap();
        let bottom = select_extremal(&asc, frac(1, 3), Extremal::Bottom).unwrap();
        assert_eq!(top.selected_ids, ["a"]);
        let mut all: Vec<_> = top
            .selected_ids
            .iter()
            .chain(&bottom.selected_ids)
            .collect();
        all.sort();
        assert_eq!(all, ["a", "b", "c"]);
    }

    #[test]
    fn random_selection() {
        let ids: Vec<String> = (0..10).map(|i| i.to_string()).collect();
        assert_eq!(
            select_random(&ids, PruningFraction::ZERO, 99).selected_ids,
            ids
        );
        let a = select_random(&ids, frac(1, 2), 5);
        let b = select_random(&ids, frac(1, 2), 5);
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn allocation_floor_then_distribute() {
        assert_eq!(allocate_counts(&[5, 5], frac(2, 5)), [3, 3]);
        // 0.7 of 4,4,2 = 2.8,2.8,1.4 -> floors 2,2,1 and round(7.0)=7 -> +1,+1
        assert_eq!(allocate_counts(&[4, 4, 2], frac(3, 10)), [3, 3, 1]);
        // retain 1 of 100 in ten buckets: all floors are zero, first bucket gets it
        assert_eq!(
            allocate_counts(&[10; 10], frac(99, 100)),
            [1, 0, 0, 0, 0, 0, 0, 0, 0, 0]
        );
        // tiny first bucket is skipped once exhausted
        assert_eq!(allocate_counts(&[1, 99], frac(9, 10)), [1, 9]);
    }

    #[test]
    fn cowerage_draws_from_each_bucket() {
        let r = ranked(10);
        let cfg = PruneConfig::cowerage(frac(2, 5), 5, 11);
        let s = cowerage(&r, &cfg).unwrap();
        assert_eq!(s.len(), 6);
        let top_bucket: HashSet<&str> = r.ids().take(5).collect();
        let in_top = s
            .selected_ids
            .iter()
            .filter(|id| top_bucket.contains(id.as_str()))
            .count();
        assert_eq!(in_top, 3);
    }

    #[test]
    fn cowerage_identity_at_zero() {
        let r = ranked(10);
        for seed in 0..5 {
            let s = cowerage(&r, &PruneConfig::cowerage(PruningFraction::ZERO, 3, seed)).unwrap();
            assert_eq!(s.selected_ids, r.ids().collect::<Vec<_>>());
        }
    }

    #[test]
    fn cowerage_within_bucket_modes() {
        let r = ranked(10);
        let mut cfg = PruneConfig::cowerage(frac(3, 5), 5, 0);
        cfg.within_bucket = WithinBucket::Top;
        let top = cowerage(&r, &cfg).unwrap();
        assert_eq!(top.selected_ids, ["e009", "e008", "e004", "e003"]);
        cfg.within_bucket = WithinBucket::Bottom;
        let bottom = cowerage(&r, &cfg).unwrap();
        assert_eq!(bottom.selected_ids, ["e006", "e005", "e001", "e000"]);
        assert_eq!(top.provenance.seed, None);
    }

    #[test]
    fn offset_window() {
        let r = ranked(100);
        let w = select_offset_window(&r, 0, 50).unwrap();
        let top = select_extremal(&r, frac(1, 2), Extremal::Top).unwrap();
        assert_eq!(w.selected_ids, top.selected_ids);
        // ascending ranks 41..=90 are ids e040..=e089
        let w = select_offset_window(&r, 10, 50).unwrap();
        let mut got = w.selected_ids.clone();
        got.sort();
        let want: Vec<String> = (40..90).map(|i| format!("e{i:03}")).collect();
        assert_eq!(got, want);
        assert!(matches!(
            select_offset_window(&r, 60, 50),
            Err(Error::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn length_scores() {
        let m = DatasetManifest::from_entries(
            [("a", "abc"), ("b", "Twelve o'clock level.")]
                .iter()
                .map(|(id, t)| ManifestEntry {
                    id: (*id).into(),
                    text: (*t).into(),
                    audio_path: None,
                    phonemes: None,
                    duration_sec: None,
                })
                .collect(),
        )
        .unwrap();
        let s = score_by_length(&m).unwrap();
        assert_eq!(s.get("a"), Some(&Score::from_integer(3)));
        assert_eq!(s.get("b"), Some(&Score::from_integer(21)));
    }

    #[test]
    fn prune_dispatch_sizes() {
        let m = matrix(37);
        for strategy in [
            Strategy::Random,
            Strategy::TopK,
            Strategy::BottomK,
            Strategy::Cowerage,
            Strategy::OffsetWindow,
            Strategy::LengthCowerage,
        ] {
            let mut cfg = PruneConfig::cowerage(frac(3, 10), 5, 1).with_strategy(strategy);
            cfg.bucket_size = 5;
            let s = prune(&m, &cfg).unwrap();
            assert_eq!(s.len(), 26, "{strategy:?}");
            assert_eq!(s.provenance.strategy, strategy);
        }
    }

    #[test]
    fn oversized_bucket_collapses_to_one() {
        let m = matrix(5);
        let cfg = PruneConfig::cowerage(frac(1, 2), 500, 3);
        assert_eq!(prune(&m, &cfg).unwrap().len(), 3);
    }
}
