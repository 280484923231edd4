//! Phonemic cover and its relation to training WER.
//!
//! The phonemic cover of an example is the number of distinct phoneme labels
//! in its transcription. Transcriptions are hyphen-separated label strings,
//! e.g. `t-w-eh-l-v-ax-kcl-k-l-aa-kcl-k-l-eh-v-el`. Labels are opaque; the
//! only special case is a small set of labels that themselves contain a
//! hyphen (TIMIT's `ax-h`), which are re-joined after splitting.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mwu::{mann_whitney_u, MwuResult};
use crate::pruning::SubsetManifest;
use crate::score::Score;
use crate::scores::ScoreMatrix;

/// Labels that contain the separator.
pub const COMPOUND_LABELS: &[&str] = &["ax-h"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhonemeTranscript {
    pub example_id: String,
    pub phonemes: Vec<String>,
}

/// Splits a hyphen-separated transcription. Surrounding parentheses and
/// whitespace are ignored.
pub fn split_phonemes(text: &str) -> Vec<String> {
    let text = text.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = text
        .split('-')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    let mut out = Vec::with_capacity(parts.len());
    let mut i = 0;
    while i < parts.len() {
        if i + 1 < parts.len() {
            let joined = format!("{}-{}", parts[i], parts[i + 1]);
            if COMPOUND_LABELS.contains(&joined.as_str()) {
                out.push(joined);
                i += 2;
                continue;
            }
        }
        out.push(parts[i].to_owned());
        i += 1;
    }
    out
}

impl PhonemeTranscript {
    pub fn new(example_id: impl Into<String>, phonemes: Vec<String>) -> Self {
        PhonemeTranscript {
            example_id: example_id.into(),
            phonemes: phonemes.into_iter().filter(|p| !p.is_empty()).collect(),
        }
    }

    pub fn parse(example_id: impl Into<String>, text: &str) -> Self {
        PhonemeTranscript::new(example_id, split_phonemes(text))
    }

    pub fn cover(&self) -> usize {
        phonemic_cover(&self.phonemes)
    }
}

/// Number of distinct labels.
pub fn phonemic_cover<S: AsRef<str>>(phonemes: &[S]) -> usize {
    phonemes
        .iter()
        .map(AsRef::as_ref)
        .collect::<HashSet<_>>()
        .len()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverGroup {
    pub mean_wer: f64,
    #[serde(skip)]
    pub mean_wer_exact: Score,
    pub example_count: usize,
}

/// Mean training WER of examples grouped by phonemic cover.
#[derive(Clone, Debug, PartialEq, Default, Serialize)]
pub struct CoverProfile {
    pub by_cover: BTreeMap<usize, CoverGroup>,
}

fn cover_index(transcripts: &[PhonemeTranscript]) -> HashMap<&str, usize> {
    transcripts
        .iter()
        .map(|t| (t.example_id.as_str(), t.cover()))
        .collect()
}

pub fn cover_wer_profile(
    scores: &ScoreMatrix,
    transcripts: &[PhonemeTranscript],
) -> Result<CoverProfile> {
    let covers = cover_index(transcripts);
    let mut groups: BTreeMap<usize, Vec<&Score>> = BTreeMap::new();
    for (id, score) in scores.scores() {
        let cover = covers
            .get(id.as_str())
            .ok_or_else(|| Error::MissingTranscript(id.clone()))?;
        groups.entry(*cover).or_default().push(score);
    }
    let by_cover = groups
        .into_iter()
        .map(|(cover, members)| {
            let mean = Score::mean(members.iter().copied()).expect("group is non-empty");
            (
                cover,
                CoverGroup {
                    mean_wer: mean.to_f64(),
                    mean_wer_exact: mean,
                    example_count: members.len(),
                },
            )
        })
        .collect();
    Ok(CoverProfile { by_cover })
}

/// Phonemic covers of the subset's examples, in subset order.
pub fn subset_covers(
    subset: &SubsetManifest,
    transcripts: &[PhonemeTranscript],
) -> Result<Vec<f64>> {
    let covers = cover_index(transcripts);
    subset
        .selected_ids
        .iter()
        .map(|id| {
            covers
                .get(id.as_str())
                .map(|&c| c as f64)
                .ok_or_else(|| Error::MissingTranscript(id.clone()))
        })
        .collect()
}

/// Mann-Whitney U test on the phonemic covers of two subsets.
pub fn compare_subset_distributions(
    subset_a: &SubsetManifest,
    subset_b: &SubsetManifest,
    transcripts: &[PhonemeTranscript],
) -> Result<MwuResult> {
    mann_whitney_u(
        &subset_covers(subset_a, transcripts)?,
        &subset_covers(subset_b, transcripts)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pruning::{Provenance, PruneConfig};

    #[test]
    fn cover_counts_distinct_labels() {
        let t = PhonemeTranscript::parse("x", "t-w-eh-l-v-ax-kcl-k-l-aa-kcl-k-l-eh-v-el");
        assert_eq!(t.cover(), 10);
        assert_eq!(phonemic_cover::<&str>(&[]), 0);
        assert_eq!(phonemic_cover(&["aa", "aa", "aa"]), 1);
    }

    #[test]
    fn parser_trims_and_rejoins_compound_labels() {
        assert_eq!(split_phonemes("(a - b-\nc)"), ["a", "b", "c"]);
        assert_eq!(split_phonemes("k-ax-h-tcl"), ["k", "ax-h", "tcl"]);
        assert_eq!(split_phonemes("dh-ax-hv-ay"), ["dh", "ax", "hv", "ay"]);
        assert!(split_phonemes("").is_empty());
    }

    fn matrix(pairs: &[(&str, f64)]) -> ScoreMatrix {
        ScoreMatrix::from_decimals(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn profile_groups_by_cover() {
        let t = vec![
            PhonemeTranscript::parse("a", "p1-p2-p3-p4-p5"),
            PhonemeTranscript::parse("b", "q1-q2-q3-q4-q5-q1"),
            PhonemeTranscript::parse("c", "r1-r2-r3"),
        ];
        let p = cover_wer_profile(&matrix(&[("a", 0.2), ("b", 0.4)]), &t).unwrap();
        assert_eq!(p.by_cover.len(), 1);
        assert_eq!(p.by_cover[&5].mean_wer_exact, Score::from_ratio(3, 10));
        assert_eq!(p.by_cover[&5].example_count, 2);

        let p = cover_wer_profile(&matrix(&[("c", 0.7)]), &t).unwrap();
        assert_eq!(p.by_cover[&3].mean_wer, 0.7);

        let p = cover_wer_profile(&matrix(&[("a", 0.2), ("c", 0.1)]), &t).unwrap();
        assert_eq!(p.by_cover.keys().copied().collect::<Vec<_>>(), [3, 5]);
    }

    #[test]
    fn profile_requires_transcripts() {
        let err = cover_wer_profile(&matrix(&[("zz", 0.1)]), &[]).unwrap_err();
        assert!(matches!(err, Error::MissingTranscript(ref id) if id == "zz"));
    }

    fn subset(ids: &[&str]) -> SubsetManifest {
        SubsetManifest::new(
            ids.iter().map(|s| s.to_string()).collect(),
            Provenance::new(&PruneConfig::default(), false),
        )
    }

    fn labels(n: usize, tag: &str) -> String {
        (0..n)
            .map(|i| format!("{tag}{i}"))
            .collect::<Vec<_>>()
            .join("-")
    }

    #[test]
    fn subset_comparison() {
        let t: Vec<PhonemeTranscript> = [("a", 1), ("b", 2), ("c", 9), ("d", 10)]
            .iter()
            .map(|(id, n)| PhonemeTranscript::parse(*id, &labels(*n, "x")))
            .collect();
        let r =
            compare_subset_distributions(&subset(&["a", "b"]), &subset(&["c", "d"]), &t).unwrap();
        assert_eq!(r.u, 0.0);
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-12);

        let same =
            compare_subset_distributions(&subset(&["a", "c"]), &subset(&["a", "c"]), &t).unwrap();
        assert_eq!(same.u, 2.0);
        assert!(same.p_value > 0.99);

        assert!(compare_subset_distributions(&subset(&["a"]), &subset(&["q"]), &t).is_err());
    }
}
