//! Dataset manifests: one JSON object per line.
//!
//! ```text
//! {"id":"dr1-fcjf0-sa1","text":"She had your dark suit.","audio_path":"a.wav","phonemes":"sh-iy-hv-ae-dcl","duration_sec":2.9}
//! ```
//!
//! `id` and `text` are required. `audio_path`, `phonemes` and `duration_sec`
//! are optional and passed through untouched.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phoneme::PhonemeTranscript;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub text: String,
    #[serde(default, alias = "audioPath", skip_serializing_if = "Option::is_none")]
    pub audio_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonemes: Option<String>,
    #[serde(
        default,
        alias = "durationSec",
        skip_serializing_if = "Option::is_none"
    )]
    pub duration_sec: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
    index: HashMap<String, usize>,
}

/// Yields `(line_number, line)` for every non-blank line, 1-based.
pub(crate) fn records<R: Read>(source: R) -> impl Iterator<Item = Result<(usize, String)>> {
    BufReader::new(source)
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Ok((i + 1, l))),
            Err(e) => Some(Err(Error::Io(e))),
        })
}

impl DatasetManifest {
    pub fn from_entries(entries: Vec<ManifestEntry>) -> Result<Self> {
        let mut manifest = DatasetManifest::default();
        for (i, entry) in entries.into_iter().enumerate() {
            manifest.push(entry, i + 1)?;
        }
        Ok(manifest)
    }

    fn push(&mut self, entry: ManifestEntry, line: usize) -> Result<()> {
        if entry.id.is_empty() {
            return Err(Error::MalformedLine {
                line,
                reason: "empty id".into(),
            });
        }
        if entry.text.is_empty() {
            return Err(Error::MissingText { line, id: entry.id });
        }
        if self.index.contains_key(&entry.id) {
            return Err(Error::DuplicateId { line, id: entry.id });
        }
        self.index.insert(entry.id.clone(), self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn parse<R: Read>(source: R) -> Result<Self> {
        let mut manifest = DatasetManifest::default();
        for record in records(source) {
            let (line, text) = record?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::MalformedLine {
                    line,
                    reason: e.to_string(),
                })?;
            if value.get("text").is_none() {
                let id = value
                    .get("id")
                    .and_then(|v| v.as_str())
                    .unwrap_or_default()
                    .to_owned();
                return Err(Error::MissingText { line, id });
            }
            let entry: ManifestEntry =
                serde_json::from_value(value).map_err(|e| Error::MalformedLine {
                    line,
                    reason: e.to_string(),
                })?;
            manifest.push(entry, line)?;
        }
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(File::open(path)?)
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.index.get(id).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    /// Phoneme transcripts for every entry that carries a `phonemes` field.
    pub fn transcripts(&self) -> Vec<PhonemeTranscript> {
        self.entries
            .iter()
            .filter_map(|e| {
                e.phonemes
                    .as_deref()
                    .map(|p| PhonemeTranscript::parse(e.id.clone(), p))
            })
            .collect()
    }

    /// Serializes back to line-delimited JSON.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("manifest entry serializes"));
            out.push('\n');
        }
        out
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    DatasetManifest::load(path)
}
