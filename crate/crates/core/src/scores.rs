//! Per-(run, epoch, example) score logs and the averaged score matrix.
//!
//! A hypothesis log has one JSON object per line with exactly these fields:
//!
//! ```text
//! {"id":"ex1","run":0,"epoch":8,"hyp":"the cat sat"}
//! ```
//!
//! or, for logs that were scored elsewhere,
//!
//! ```text
//! {"id":"ex1","run":0,"epoch":8,"wer":0.25}
//! ```
//!
//! A log uses one form throughout. Epochs and runs are 0-based integers and
//! are taken as written.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::manifest::{records, DatasetManifest};
use crate::score::Score;
use crate::wer::{tokenize, word_error_rate, NormalizationPolicy};

#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    Hypothesis(String),
    Wer(Score),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogEntry {
    pub example_id: String,
    pub run: u32,
    pub epoch: u32,
    pub observation: Observation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogForm {
    Hypotheses,
    PreScored,
}

/// Validated contents of a hypothesis or pre-scored log.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreLog {
    entries: Vec<LogEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    #[default]
    Strict,
    Skip,
}

fn field_u32(obj: &Map<String, Value>, key: &str, line: usize) -> Result<u32> {
    obj.get(key)
        .and_then(Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::MalformedLine {
            line,
            reason: format!("`{key}` must be a non-negative integer"),
        })
}

fn parse_entry(line: usize, text: &str) -> Result<LogEntry> {
    let malformed = |reason: String| Error::MalformedLine { line, reason };
    let value: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("expected a JSON object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "id" | "run" | "epoch" | "hyp" | "wer") {
            return Err(malformed(format!("unexpected field `{key}`")));
        }
    }
    let example_id = obj
        .get("id")
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| malformed("`id` must be a non-empty string".into()))?
        .to_owned();
    let run = field_u32(obj, "run", line)?;
    let epoch = field_u32(obj, "epoch", line)?;
    let observation = match (obj.get("hyp"), obj.get("wer")) {
        (Some(h), None) => Observation::Hypothesis(
            h.as_str()
                .ok_or_else(|| malformed("`hyp` must be a string".into()))?
                .to_owned(),
        ),
        (None, Some(w)) => {
            let w = w
                .as_f64()
                .ok_or_else(|| malformed("`wer` must be a number".into()))?;
            let score = Score::from_f64_decimal(w).map_err(|e| malformed(e.to_string()))?;
            if score.is_negative() {
                return Err(malformed("`wer` must be non-negative".into()));
            }
            Observation::Wer(score)
        }
        (Some(_), Some(_)) => return Err(malformed("record has both `hyp` and `wer`".into())),
        (None, None) => return Err(malformed("record needs `hyp` or `wer`".into())),
    };
    Ok(LogEntry {
        example_id,
        run,
        epoch,
        observation,
    })
}

/// Reads and validates a log against `manifest`.
pub fn ingest_scores<R: Read>(source: R, manifest: &DatasetManifest) -> Result<ScoreLog> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    let mut form = None;
    for record in records(source) {
        let (line, text) = record?;
        let entry = parse_entry(line, &text)?;
        if !manifest.contains(&entry.example_id) {
            return Err(Error::UnknownId {
                line,
                id: entry.example_id,
            });
        }
        let this_form = match entry.observation {
            Observation::Hypothesis(_) => LogForm::Hypotheses,
            Observation::Wer(_) => LogForm::PreScored,
        };
        if *form.get_or_insert(this_form) != this_form {
            return Err(Error::MixedLog { line });
        }
        if !seen.insert((entry.example_id.clone(), entry.run, entry.epoch)) {
            return Err(Error::DuplicateTriple {
                line,
                id: entry.example_id,
                run: entry.run,
                epoch: entry.epoch,
            });
        }
        entries.push(entry);
    }
    Ok(ScoreLog { entries })
}

impl ScoreLog {
    /// Builds a log from in-memory entries, applying the same uniqueness and
    /// single-form rules as [`ingest_scores`].
    pub fn from_entries(entries: Vec<LogEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut form = None;
        for (i, e) in entries.iter().enumerate() {
            let this_form = match e.observation {
                Observation::Hypothesis(_) => LogForm::Hypotheses,
                Observation::Wer(_) => LogForm::PreScored,
            };
            if *form.get_or_insert(this_form) != this_form {
                return Err(Error::MixedLog { line: i + 1 });
            }
            if !seen.insert((e.example_id.as_str(), e.run, e.epoch)) {
                return Err(Error::DuplicateTriple {
                    line: i + 1,
                    id: e.example_id.clone(),
                    run: e.run,
                    epoch: e.epoch,
                });
            }
        }
        Ok(ScoreLog { entries })
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn form(&self) -> Option<LogForm> {
        self.entries.first().map(|e| match e.observation {
            Observation::Hypothesis(_) => LogForm::Hypotheses,
            Observation::Wer(_) => LogForm::PreScored,
        })
    }

    pub fn epochs(&self) -> BTreeSet<u32> {
        self.entries.iter().map(|e| e.epoch).collect()
    }

    /// Replaces every hypothesis with its WER against the manifest reference.
    pub fn to_prescored(
        &self,
        manifest: &DatasetManifest,
        policy: NormalizationPolicy,
    ) -> Result<ScoreLog> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(LogEntry {
                    observation: Observation::Wer(score_entry(e, manifest, policy)?),
                    ..e.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreLog { entries })
    }

    /// Line-delimited serialization in the ingest schema. Pre-scored WER is
    /// written as a decimal.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a, T: Serialize> {
            id: &'a str,
            run: u32,
            epoch: u32,
            #[serde(flatten)]
            value: T,
        }
        #[derive(Serialize)]
        enum Value<'a> {
            #[serde(rename = "hyp")]
            Hyp(&'a str),
            #[serde(rename = "wer")]
            Wer(f64),
        }
        let mut out = String::new();
        for e in &self.entries {
            let value = match &e.observation {
                Observation::Hypothesis(h) => Value::Hyp(h),
                Observation::Wer(w) => Value::Wer(w.to_f64()),
            };
            let line = Line {
                id: &e.example_id,
                run: e.run,
                epoch: e.epoch,
                value,
            };
            out.push_str(&serde_json::to_string(&line).expect("log line serializes"));
            out.push('\n');
        }
        out
    }
}

fn score_entry(
    entry: &LogEntry,
    manifest: &DatasetManifest,
    policy: NormalizationPolicy,
) -> Result<Score> {
    match &entry.observation {
        Observation::Wer(w) => Ok(w.clone()),
        Observation::Hypothesis(hyp) => {
            let reference = manifest
                .get(&entry.example_id)
                .ok_or_else(|| Error::NoScore(entry.example_id.clone()))?;
            if tokenize(&reference.text, policy).is_empty() {
                return Err(Error::Degenerate(format!(
                    "reference for `{}` has no words after normalization",
                    entry.example_id
                )));
            }
            Ok(word_error_rate(&reference.text, hyp, policy)?.rate())
        }
    }
}

/// Averaged training WER per example at one selection epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix {
    pub epoch: u32,
    pub run_count: usize,
    scores: BTreeMap<String, Score>,
}

#[derive(Serialize)]
struct MatrixHeader<'a> {
    kind: &'a str,
    epoch: u32,
    run_count: usize,
}

#[derive(Serialize)]
struct MatrixRow<'a> {
    id: &'a str,
    wer: f64,
    exact: String,
}

impl ScoreMatrix {
    pub fn new(epoch: u32, run_count: usize, scores: BTreeMap<String, Score>) -> Result<Self> {
        if run_count == 0 {
            return Err(Error::InvalidConfig("run count must be at least 1".into()));
        }
        if let Some((id, _)) = scores.iter().find(|(_, s)| s.is_negative()) {
            return Err(Error::InvalidConfig(format!("negative score for `{id}`")));
        }
        Ok(ScoreMatrix {
            epoch,
            run_count,
            scores,
        })
    }

    /// Convenience constructor from decimal scores, mostly for tests and
    /// examples.
    pub fn from_decimals<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let scores = pairs
            .into_iter()
            .map(|(id, w)| Ok((id.to_owned(), Score::from_f64_decimal(w)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        ScoreMatrix::new(0, 1, scores)
    }

    pub fn scores(&self) -> &BTreeMap<String, Score> {
        &self.scores
    }

    pub fn get(&self, id: &str) -> Option<&Score> {
        self.scores.get(id)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.scores.keys().map(String::as_str)
    }

    /// Header line followed by one `{"id","wer","exact"}` row per example,
    /// sorted by id. `exact` carries the rational value so a reload ranks
    /// identically.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&MatrixHeader {
            kind: "score_matrix",
            epoch: self.epoch,
            run_count: self.run_count,
        })
        .expect("header serializes");
        out.push('\n');
        for (id, score) in &self.scores {
            let row = MatrixRow {
                id,
                wer: score.to_f64(),
                exact: score.exact_string(),
            };
            out.push_str(&serde_json::to_string(&row).expect("row serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse<R: Read>(source: R) -> Result<Self> {
        let mut lines = records(source);
        let (line, header) = lines.next().ok_or(Error::Empty("score matrix file"))??;
        let header: Value = serde_json::from_str(&header).map_err(|e| Error::MalformedLine {
            line,
            reason: e.to_string(),
        })?;
        if header.get("kind").and_then(Value::as_str) != Some("score_matrix") {
            return Err(Error::MalformedLine {
                line,
                reason: "first record must be the score_matrix header".into(),
            });
        }
        let obj = header.as_object().expect("checked above");
        let epoch = field_u32(obj, "epoch", line)?;
        let run_count = field_u32(obj, "run_count", line)? as usize;
        let mut scores = BTreeMap::new();
        for record in lines {
            let (line, text) = record?;
            let malformed = |reason: String| Error::MalformedLine { line, reason };
            let row: Value = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
            let id = row
                .get("id")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed("missing `id`".into()))?
                .to_owned();
            let score = match (row.get("exact").and_then(Value::as_str), row.get("wer")) {
                (Some(exact), _) => {
                    Score::parse_exact(exact).map_err(|e| malformed(e.to_string()))?
                }
                (None, Some(w)) => Score::from_f64_decimal(
                    w.as_f64()
                        .ok_or_else(|| malformed("`wer` must be a number".into()))?,
                )
                .map_err(|e| malformed(e.to_string()))?,
                (None, None) => return Err(malformed("missing `wer`".into())),
            };
            if scores.insert(id.clone(), score).is_some() {
                return Err(Error::DuplicateId { line, id });
            }
        }
        ScoreMatrix::new(epoch, run_count, scores)
    }
}

/// Averages each example's WER over runs at `epoch`, scoring hypotheses
/// against the manifest references first.
///
/// Under [`MissingPolicy::Strict`] every example must have a record from
/// every run seen at that epoch. Under [`MissingPolicy::Skip`] incomplete
/// examples are averaged over the runs they have and examples with no record
/// at all are left out; each case is logged as a warning.
pub fn average_at_epoch(
    log: &ScoreLog,
    manifest: &DatasetManifest,
    epoch: u32,
    missing: MissingPolicy,
    policy: NormalizationPolicy,
) -> Result<ScoreMatrix> {
    let at_epoch: Vec<&LogEntry> = log.entries.iter().filter(|e| e.epoch == epoch).collect();
    if at_epoch.is_empty() {
        return Err(Error::EpochNotPresent(epoch));
    }
    let runs: BTreeSet<u32> = at_epoch.iter().map(|e| e.run).collect();
    let mut per_example: BTreeMap<&str, Vec<(u32, Score)>> = BTreeMap::new();
    for entry in at_epoch {
        if !manifest.contains(&entry.example_id) {
            return Err(Error::UnknownId {
                line: 0,
                id: entry.example_id.clone(),
            });
        }
        let wer = score_entry(entry, manifest, policy)?;
        per_example
            .entry(entry.example_id.as_str())
            .or_default()
            .push((entry.run, wer));
    }

    let mut scores = BTreeMap::new();
    for id in manifest.ids() {
        let observed = per_example.get(id).map(Vec::as_slice).unwrap_or_default();
        if observed.len() < runs.len() {
            let present: BTreeSet<u32> = observed.iter().map(|(r, _)| *r).collect();
            let missing_runs: Vec<u32> = runs.difference(&present).copied().collect();
            match missing {
                MissingPolicy::Strict => {
                    return Err(Error::MissingRuns {
                        id: id.to_owned(),
                        epoch,
                        missing: missing_runs,
                    })
                }
                MissingPolicy::Skip => {
                    log::warn!(
                        "example `{id}` missing run(s) {missing_runs:?} at epoch {epoch}; \
                         averaging over {} present run(s)",
                        observed.len()
                    );
                }
            }
        }
        if let Some(mean) = Score::mean(observed.iter().map(|(_, s)| s)) {
            scores.insert(id.to_owned(), mean);
        } else {
            log::warn!("example `{id}` has no record at epoch {epoch}; left out");
        }
    }
    ScoreMatrix::new(epoch, runs.len(), scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ManifestEntry;

    fn manifest(ids: &[(&str, &str)]) -> DatasetManifest {
        DatasetManifest::from_entries(
            ids.iter()
                .map(|(id, text)| ManifestEntry {
                    id: (*id).into(),
                    text: (*text).into(),
                    audio_path: None,
                    phonemes: None,
                    duration_sec: None,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ingest_valid_lines() {
        let m = manifest(&[("a", "x"), ("b", "y"), ("c", "z")]);
        let src = r#"{"id":"a","run":0,"epoch":8,"hyp":"x"}
{"id":"b","run":0,"epoch":8,"hyp":"y"}
{"id":"c","run":0,"epoch":8,"hyp":"q"}
"#;
        let log = ingest_scores(src.as_bytes(), &m).unwrap();
        assert_eq!(log.len(), 3);
        assert_eq!(log.form(), Some(LogForm::Hypotheses));
    }

    #[test]
    fn unknown_id_is_named() {
        let m = manifest(&[("a", "x")]);
        let src = r#"{"id":"zzz","run":0,"epoch":8,"hyp":"x"}"#;
        let err = ingest_scores(src.as_bytes(), &m).unwrap_err();
        assert!(err.to_string().contains("zzz"));
    }

    #[test]
    fn duplicate_triple_is_named() {
        let m = manifest(&[("ex1", "x")]);
        let src = "{\"id\":\"ex1\",\"run\":0,\"epoch\":8,\"wer\":0.1}\n\
                   {\"id\":\"ex1\",\"run\":0,\"epoch\":8,\"wer\":0.2}\n";
        let err = ingest_scores(src.as_bytes(), &m).unwrap_err();
        assert!(matches!(
            err,
            Error::DuplicateTriple { line: 2, ref id, run: 0, epoch: 8 } if id == "ex1"
        ));
    }

    #[test]
    fn mixed_forms_rejected() {
        let m = manifest(&[("a", "x")]);
        let src = "{\"id\":\"a\",\"run\":0,\"epoch\":8,\"wer\":0.1}\n\
                   {\"id\":\"a\",\"run\":1,\"epoch\":8,\"hyp\":\"x\"}\n";
        assert!(matches!(
            ingest_scores(src.as_bytes(), &m).unwrap_err(),
            Error::MixedLog { line: 2 }
        ));
    }

    #[test]
    fn malformed_records() {
        let m = manifest(&[("a", "x")]);
        for bad in [
            "{\"id\":\"a\",\"run\":-1,\"epoch\":8,\"hyp\":\"x\"}",
            "{\"id\":\"a\",\"run\":0,\"epoch\":8}",
            "{\"id\":\"a\",\"run\":0,\"epoch\":8,\"hyp\":\"x\",\"extra\":1}",
            "{\"id\":\"a\",\"run\":0,\"epoch\":8,\"wer\":-0.5}",
            "[1,2]",
        ] {
            assert!(
                matches!(
                    ingest_scores(bad.as_bytes(), &m).unwrap_err(),
                    Error::MalformedLine { line: 1, .. }
                ),
                "{bad}"
            );
        }
    }

    fn prescored(rows: &[(&str, u32, u32, f64)]) -> ScoreLog {
        ScoreLog::from_entries(
            rows.iter()
                .map(|&(id, run, epoch, w)| LogEntry {
                    example_id: id.into(),
                    run,
                    epoch,
                    observation: Observation::Wer(Score::from_f64_decimal(w).unwrap()),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mean_over_runs() {
        let m = manifest(&[("a", "x")]);
        let log = prescored(&[("a", 0, 8, 0.2), ("a", 1, 8, 0.4), ("a", 2, 8, 0.6)]);
        let sm = average_at_epoch(&log, &m, 8, MissingPolicy::Strict, Default::default()).unwrap();
        assert_eq!(sm.get("a"), Some(&Score::from_ratio(2, 5)));
        assert_eq!(sm.run_count, 3);
    }

    #[test]
    fn single_run_is_identity() {
        let m = manifest(&[("a", "x")]);
        let log = prescored(&[("a", 0, 8, 0.35)]);
        let sm = average_at_epoch(&log, &m, 8, MissingPolicy::Strict, Default::default()).unwrap();
        assert_eq!(sm.get("a").unwrap().to_f64(), 0.35);
    }

    #[test]
    fn perfect_hypotheses_score_zero() {
        let m = manifest(&[("a", "a b c")]);
        let src = "{\"id\":\"a\",\"run\":0,\"epoch\":8,\"hyp\":\"a b c\"}\n\
                   {\"id\":\"a\",\"run\":1,\"epoch\":8,\"hyp\":\"A B C.\"}\n";
        let log = ingest_scores(src.as_bytes(), &m).unwrap();
        let sm = average_at_epoch(&log, &m, 8, MissingPolicy::Strict, Default::default()).unwrap();
        assert_eq!(sm.get("a"), Some(&Score::zero()));
    }

    #[test]
    fn missing_epoch() {
        let m = manifest(&[("a", "x")]);
        let log = prescored(&[("a", 0, 2, 0.2)]);
        let err =
            average_at_epoch(&log, &m, 8, MissingPolicy::Strict, Default::default()).unwrap_err();
        assert!(err.to_string().contains("epoch not present"));
    }

    #[test]
    fn strict_vs_skip() {
        let m = manifest(&[("a", "x"), ("b", "y"), ("c", "z")]);
        let log = prescored(&[("a", 0, 8, 0.2), ("a", 1, 8, 0.4), ("b", 0, 8, 0.5)]);
        let err =
            average_at_epoch(&log, &m, 8, MissingPolicy::Strict, Default::default()).unwrap_err();
        assert!(matches!(err, Error::MissingRuns { ref id, .. } if id == "b"));
        let sm = average_at_epoch(&log, &m, 8, MissingPolicy::Skip, Default::default()).unwrap();
        assert_eq!(sm.len(), 2);
        assert_eq!(sm.get("b").unwrap().to_f64(), 0.5);
        assert!(sm.get("c").is_none());
    }

    #[test]
    fn matrix_jsonl_round_trip() {
        let mut scores = BTreeMap::new();
        scores.insert("a".to_owned(), Score::from_ratio(1, 3));
        scores.insert("b".to_owned(), Score::from_ratio(5, 2));
        let sm = ScoreMatrix::new(8, 10, scores).unwrap();
        let text = sm.to_jsonl();
        assert!(text.starts_with("{\"kind\":\"score_matrix\",\"epoch\":8,\"run_count\":10}\n"));
        assert_eq!(ScoreMatrix::parse(text.as_bytes()).unwrap(), sm);
    }
}
