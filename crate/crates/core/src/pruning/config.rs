use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pruning::buckets::BucketMode;
use crate::pruning::fraction::PruningFraction;

/// Bucket size used when none is given.
pub const DEFAULT_BUCKET_SIZE: usize = 500;
/// Selection epoch used when none is given.
pub const DEFAULT_SELECTION_EPOCH: u32 = 8;
/// Number of independent runs the training WER is averaged over by default.
pub const DEFAULT_RUN_COUNT: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Random,
    TopK,
    BottomK,
    #[default]
    Cowerage,
    OffsetWindow,
    /// Cowerage over character lengths instead of training WER.
    LengthCowerage,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::TopK => "top-k",
            Strategy::BottomK => "bottom-k",
            Strategy::Cowerage => "cowerage",
            Strategy::OffsetWindow => "offset-window",
            Strategy::LengthCowerage => "length-cowerage",
        }
    }
}

/// How examples are picked inside one bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WithinBucket {
    /// Uniform without replacement.
    #[default]
    Random,
    /// Highest scores of the bucket.
    Top,
    /// Lowest scores of the bucket.
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Top,
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneConfig {
    pub strategy: Strategy,
    pub fraction: PruningFraction,
    pub bucket_size: usize,
    pub bucket_mode: BucketMode,
    pub within_bucket: WithinBucket,
    pub seed: u64,
    /// Offset-window strategy: number of highest-scoring examples skipped.
    pub offset: usize,
    /// Offset-window strategy: window length. Defaults to the retain size.
    #[serde(default)]
    pub window: Option<usize>,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            strategy: Strategy::Cowerage,
            fraction: PruningFraction::ZERO,
            bucket_size: DEFAULT_BUCKET_SIZE,
            bucket_mode: BucketMode::EqualCount,
            within_bucket: WithinBucket::Random,
            seed: 0,
            offset: 0,
            window: None,
        }
    }
}

impl PruneConfig {
    pub fn cowerage(fraction: PruningFraction, bucket_size: usize, seed: u64) -> Self {
        PruneConfig {
            fraction,
            bucket_size,
            seed,
            ..Default::default()
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// Checks the configuration against a dataset of `len` examples and
    /// returns the bucket size to use. A bucket size above the dataset size
    /// collapses to a single bucket.
    pub fn effective_bucket_size(&self, len: usize) -> Result<usize> {
        if self.bucket_size == 0 {
            return Err(Error::InvalidConfig(
                "bucket size must be at least 1".into(),
            ));
        }
        if len == 0 {
            return Err(Error::Empty("dataset has no examples"));
        }
        if self.bucket_size > len {
            log::warn!(
                "bucket size {} exceeds dataset size {len}; using a single bucket",
                self.bucket_size
            );
            return Ok(len);
        }
        Ok(self.bucket_size)
    }
}
