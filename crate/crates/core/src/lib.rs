//! Training-WER driven dataset pruning for speech recognition fine-tuning.
//!
//! The crate scores per-example hypotheses logged during a fine-tuning run,
//! averages them into a per-example training WER, and selects a retained
//! subset with one of several strategies. The main strategy, cowerage, ranks
//! examples by training WER, cuts the ranking into buckets and samples
//! uniformly from each bucket so the subset covers the whole WER range.
//!
//! Alongside selection the crate provides phonemic-cover analysis with a
//! Mann-Whitney U test, and Monte Carlo checks of two sampling properties of
//! stratified selection: tail inclusion and the variance of the subset mean.
//!
//! ```
//! use cowerage::pruning::{prune, PruneConfig, PruningFraction};
//! use cowerage::scores::ScoreMatrix;
//!
//! let scores = ScoreMatrix::from_decimals([
//!     ("a", 0.9), ("b", 0.1), ("c", 0.5), ("d", 0.4),
//! ]).unwrap();
//! let config = PruneConfig::cowerage(PruningFraction::new(1, 2).unwrap(), 2, 7);
//! let subset = prune(&scores, &config).unwrap();
//! assert_eq!(subset.len(), 2);
//! ```

pub mod error;
pub mod fixtures;
pub mod manifest;
pub mod mwu;
pub mod phoneme;
pub mod pipeline;
pub mod pruning;
pub mod score;
pub mod scores;
pub mod simulation;
pub mod wer;

pub use error::{Error, Result};
pub use manifest::{load_manifest, DatasetManifest, ManifestEntry};
pub use score::Score;
