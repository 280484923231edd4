//! Word tokenization and word error rate.
//!
//! `align` computes a minimum-cost edit script between a reference and a
//! hypothesis under unit costs and reports the substitution, insertion and
//! deletion counts of one such script. When several minimal scripts exist the
//! traceback prefers the diagonal (match or substitution), then deletion, then
//! insertion, so the reported split is deterministic. The total is unique.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::Score;

/// How transcripts are normalized before splitting into words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationPolicy {
    pub lowercase: bool,
    /// Strip punctuation from the start and end of each token. Interior
    /// apostrophes and hyphens are kept (`o'clock`, `run-down`).
    pub strip_edge_punctuation: bool,
}

impl NormalizationPolicy {
    /// Whitespace split only.
    pub const VERBATIM: Self = NormalizationPolicy {
        lowercase: false,
        strip_edge_punctuation: false,
    };
}

impl Default for NormalizationPolicy {
    fn default() -> Self {
        NormalizationPolicy {
            lowercase: true,
            strip_edge_punctuation: true,
        }
    }
}

/// A normalized word sequence together with the text it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<String>,
    source: String,
}

impl TokenSequence {
    /// Builds a sequence from pre-split words. Empty words are dropped and
    /// words containing whitespace are split.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let tokens: Vec<String> = words
            .into_iter()
            .flat_map(|w| {
                w.as_ref()
                    .split_whitespace()
                    .map(str::to_owned)
                    .collect::<Vec<_>>()
            })
            .collect();
        let source = tokens.join(" ");
        TokenSequence { tokens, source }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn tokenize(text: &str, policy: NormalizationPolicy) -> TokenSequence {
    let tokens = text
        .split_whitespace()
        .filter_map(|raw| {
            let word = if policy.strip_edge_punctuation {
                raw.trim_matches(|c: char| !c.is_alphanumeric())
            } else {
                raw
            };
            if word.is_empty() {
                None
            } else if policy.lowercase {
                Some(word.to_lowercase())
            } else {
                Some(word.to_owned())
            }
        })
        .collect();
    TokenSequence {
        tokens,
        source: text.to_owned(),
    }
}

/// Edit counts of one minimal alignment and the resulting rate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WerBreakdown {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub ref_len: usize,
}

impl WerBreakdown {
    pub fn edits(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }

    /// `(S + I + D) / N`. May exceed one when the hypothesis inserts words.
    pub fn rate(&self) -> Score {
        Score::from_ratio(self.edits() as i64, self.ref_len as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Diagonal,
    Delete,
    Insert,
}

fn cost_table<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> Vec<Vec<usize>> {
    let (n, m) = (reference.len(), hypothesis.len());
    let mut table = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = usize::from(reference[i - 1] != hypothesis[j - 1]);
            table[i][j] = (table[i - 1][j - 1] + sub)
                .min(table[i - 1][j] + 1)
                .min(table[i][j - 1] + 1);
        }
    }
    table
}

/// Unit-cost edit distance between two sequences.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    // two-row variant of `cost_table`
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Counts of one minimal alignment between arbitrary sequences. Unlike
/// [`align`] this accepts an empty reference.
pub fn alignment_counts<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> WerBreakdown {
    let table = cost_table(reference, hypothesis);
    let (mut i, mut j) = (reference.len(), hypothesis.len());
    let mut out = WerBreakdown {
        substitutions: 0,
        insertions: 0,
        deletions: 0,
        ref_len: reference.len(),
    };
    while i > 0 || j > 0 {
        let here = table[i][j];
        let step = if i > 0
            && j > 0
            && table[i - 1][j - 1] + usize::from(reference[i - 1] != hypothesis[j - 1]) == here
        {
            Step::Diagonal
        } else if i > 0 && table[i - 1][j] + 1 == here {
            Step::Delete
        } else {
            Step::Insert
        };
        match step {
            Step::Diagonal => {
                if reference[i - 1] != hypothesis[j - 1] {
                    out.substitutions += 1;
                }
                i -= 1;
                j -= 1;
            }
            Step::Delete => {
                out.deletions += 1;
                i -= 1;
            }
            Step::Insert => {
                out.insertions += 1;
                j -= 1;
            }
        }
    }
    out
}

pub fn align(reference: &TokenSequence, hypothesis: &TokenSequence) -> Result<WerBreakdown> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    Ok(alignment_counts(reference.tokens(), hypothesis.tokens()))
}

/// Tokenizes both texts with `policy` and aligns them.
pub fn word_error_rate(
    reference: &str,
    hypothesis: &str,
    policy: NormalizationPolicy,
) -> Result<WerBreakdown> {
    align(&tokenize(reference, policy), &tokenize(hypothesis, policy))
}
