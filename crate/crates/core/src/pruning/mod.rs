//! Subset selection over ranked training scores.

pub mod buckets;
pub mod config;
pub mod fraction;
pub mod rank;
pub mod select;
pub mod subset;

pub use buckets::{partition_buckets, partition_equal_width, BucketMode, BucketPartition};
pub use config::{
    Extremal, PruneConfig, Strategy, WithinBucket, DEFAULT_BUCKET_SIZE, DEFAULT_RUN_COUNT,
    DEFAULT_SELECTION_EPOCH,
};
pub use fraction::PruningFraction;
pub use rank::{rank_examples, RankOrder, RankedEntry, RankedExamples};
pub use select::{
    allocate_counts, cowerage, prune, score_by_length, select_extremal, select_offset_window,
    select_random, stream_rng, StratifiedPlan,
};
pub use subset::{Provenance, SubsetManifest, TOOLKIT_VERSION};
