use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::Score;
use crate::scores::ScoreMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankOrder {
    Ascending,
    Descending,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedEntry {
    pub id: String,
    pub score: Score,
}

/// Examples sorted by score. Equal scores are ordered by example id
/// (lexicographically ascending) in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedExamples {
    entries: Vec<RankedEntry>,
    order: RankOrder,
}

fn compare(order: RankOrder, a: &RankedEntry, b: &RankedEntry) -> Ordering {
    let by_score = match order {
        RankOrder::Ascending => a.score.cmp(&b.score),
        RankOrder::Descending => b.score.cmp(&a.score),
    };
    by_score.then_with(|| a.id.cmp(&b.id))
}

impl RankedExamples {
    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (String, Score)>,
        order: RankOrder,
    ) -> Result<Self> {
        let mut entries: Vec<RankedEntry> = pairs
            .into_iter()
            .map(|(id, score)| RankedEntry { id, score })
            .collect();
        if entries.is_empty() {
            return Err(Error::Empty("no examples to rank"));
        }
        entries.sort_by(|a, b| compare(order, a, b));
        if let Some(w) = entries.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateId {
                line: 0,
                id: w[0].id.clone(),
            });
        }
        Ok(RankedExamples { entries, order })
    }

    pub fn order(&self) -> RankOrder {
        self.order
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score_of(&self, id: &str) -> Option<&Score> {
        self.entries.iter().find(|e| e.id == id).map(|e| &e.score)
    }

    /// The same examples re-sorted in `order`.
    pub fn reordered(&self, order: RankOrder) -> RankedExamples {
        if order == self.order {
            return self.clone();
        }
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| compare(order, a, b));
        RankedExamples { entries, order }
    }
}

pub fn rank_examples(scores: &ScoreMatrix, order: RankOrder) -> Result<RankedExamples> {
    RankedExamples::from_pairs(
        scores
            .scores()
            .iter()
            .map(|(id, s)| (id.clone(), s.clone())),
        order,
    )
}
