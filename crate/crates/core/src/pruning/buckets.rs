use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pruning::rank::RankedExamples;
use crate::score::Score;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BucketMode {
    /// Consecutive chunks of `b` ranked examples; the last may be short.
    #[default]
    EqualCount,
    /// `ceil(N / b)` equal-width score intervals between the lowest and the
    /// highest score. Empty intervals are dropped.
    EqualWidth,
}

/// Strata over a ranking. Every bucket is a contiguous span of the ranking,
/// listed in ranking order, and together they cover it exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketPartition {
    pub mode: BucketMode,
    spans: Vec<Range<usize>>,
    buckets: Vec<Vec<String>>,
    /// Score range used for equal-width strata.
    pub w_low: Option<Score>,
    pub w_high: Option<Score>,
}

impl BucketPartition {
    fn from_spans(
        ranked: &RankedExamples,
        mode: BucketMode,
        spans: Vec<Range<usize>>,
        range: Option<(Score, Score)>,
    ) -> Self {
        let buckets = spans
            .iter()
            .map(|span| {
                ranked.entries()[span.clone()]
                    .iter()
                    .map(|e| e.id.clone())
                    .collect()
            })
            .collect();
        let (w_low, w_high) = match range {
            Some((lo, hi)) => (Some(lo), Some(hi)),
            None => (None, None),
        };
        BucketPartition {
            mode,
            spans,
            buckets,
            w_low,
            w_high,
        }
    }

    pub fn buckets(&self) -> &[Vec<String>] {
        &self.buckets
    }

    /// Positions of each bucket within the ranking it was built from.
    pub fn spans(&self) -> &[Range<usize>] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.spans.iter().map(|s| s.len()).collect()
    }
}

fn equal_count_spans(len: usize, bucket_size: usize) -> Vec<Range<usize>> {
    (0..len)
        .step_by(bucket_size)
        .map(|start| start..(start + bucket_size).min(len))
        .collect()
}

/// Splits a ranking into `strata` equal-width score intervals. Interval `i`
/// (1-based, counted from the lowest score) is
/// `[lo + (i-1)(hi-lo)/M, lo + i(hi-lo)/M)`, with the top interval closed.
pub fn partition_equal_width(ranked: &RankedExamples, strata: usize) -> Result<BucketPartition> {
    if strata == 0 {
        return Err(Error::InvalidConfig(
            "number of strata must be at least 1".into(),
        ));
    }
    if ranked.is_empty() {
        return Ok(BucketPartition::from_spans(
            ranked,
            BucketMode::EqualWidth,
            Vec::new(),
            None,
        ));
    }
    let entries = ranked.entries();
    let lo = entries
        .iter()
        .map(|e| &e.score)
        .min()
        .expect("non-empty")
        .clone();
    let hi = entries
        .iter()
        .map(|e| &e.score)
        .max()
        .expect("non-empty")
        .clone();
    let width = hi.as_ratio() - lo.as_ratio();
    let m = BigRational::from_integer(BigInt::from(strata));
    let stratum_of = |s: &Score| -> usize {
        if width.is_zero() {
            return 0;
        }
        let pos = ((s.as_ratio() - lo.as_ratio()) * &m / &width).floor();
        pos.to_integer()
            .to_usize()
            .unwrap_or(strata)
            .min(strata - 1)
    };
    let mut spans: Vec<Range<usize>> = Vec::new();
    let mut current = stratum_of(&entries[0].score);
    let mut start = 0;
    for (i, e) in entries.iter().enumerate().skip(1) {
        let k = stratum_of(&e.score);
        if k != current {
            spans.push(start..i);
            start = i;
            current = k;
        }
    }
    spans.push(start..entries.len());
    Ok(BucketPartition::from_spans(
        ranked,
        BucketMode::EqualWidth,
        spans,
        Some((lo, hi)),
    ))
}

/// Buckets for a bucket size `b`. Equal-count mode yields chunks of sizes
/// `b, ..., b, N mod b`; equal-width mode uses `M = ceil(N / b)` strata.
pub fn partition_buckets(
    ranked: &RankedExamples,
    bucket_size: usize,
    mode: BucketMode,
) -> Result<BucketPartition> {
    if bucket_size == 0 {
        return Err(Error::InvalidConfig(
            "bucket size must be at least 1".into(),
        ));
    }
    match mode {
        BucketMode::EqualCount => Ok(BucketPartition::from_spans(
            ranked,
            mode,
            equal_count_spans(ranked.len(), bucket_size),
            None,
        )),
        BucketMode::EqualWidth => {
            partition_equal_width(ranked, ranked.len().div_ceil(bucket_size).max(1))
        }
    }
}
