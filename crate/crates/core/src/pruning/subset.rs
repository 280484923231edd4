//! Subset manifests and their line-delimited serialization.
//!
//! The first record is the provenance header, the rest are `{"id": ...}`
//! records in selection order:
//!
//! ```text
//! {"kind":"subset","strategy":"cowerage","count":2,"source_epoch":8,"seed":7,"toolkit_version":"0.1.0","config":{...}}
//! {"id":"ex3"}
//! {"id":"ex1"}
//! ```

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::records;
use crate::pruning::config::{PruneConfig, Strategy};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub strategy: Strategy,
    pub source_epoch: Option<u32>,
    pub seed: Option<u64>,
    pub toolkit_version: String,
    pub config: PruneConfig,
}

impl Provenance {
    pub fn new(config: &PruneConfig, uses_seed: bool) -> Self {
        Provenance {
            strategy: config.strategy,
            source_epoch: None,
            seed: uses_seed.then_some(config.seed),
            toolkit_version: TOOLKIT_VERSION.to_owned(),
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetManifest {
    pub selected_ids: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Header {
    kind: String,
    strategy: Strategy,
    count: usize,
    source_epoch: Option<u32>,
    seed: Option<u64>,
    toolkit_version: String,
    config: PruneConfig,
}

#[derive(Serialize, Deserialize)]
struct IdRecord {
    id: String,
}

impl SubsetManifest {
    pub(crate) fn new(selected_ids: Vec<String>, provenance: Provenance) -> Self {
        debug_assert_eq!(
            selected_ids.iter().collect::<HashSet<_>>().len(),
            selected_ids.len(),
            "subset contains duplicates"
        );
        SubsetManifest {
            selected_ids,
            provenance,
        }
    }

    pub fn with_source_epoch(mut self, epoch: Option<u32>) -> Self {
        self.provenance.source_epoch = epoch;
        self
    }

    pub fn len(&self) -> usize {
        self.selected_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected_ids.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.selected_ids.iter().any(|s| s == id)
    }

    pub fn to_jsonl(&self) -> String {
        let p = &self.provenance;
        let header = Header {
            kind: "subset".into(),
            strategy: p.strategy,
            count: self.selected_ids.len(),
            source_epoch: p.source_epoch,
            seed: p.seed,
            toolkit_version: p.toolkit_version.clone(),
            config: p.config.clone(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for id in &self.selected_ids {
            out.push_str(
                &serde_json::to_string(&IdRecord { id: id.clone() }).expect("id serializes"),
            );
            out.push('\n');
        }
        out
    }

    pub fn parse<R: Read>(source: R) -> Result<Self> {
        let mut lines = records(source);
        let (line, text) = lines.next().ok_or(Error::Empty("subset file"))??;
        let header: Header = serde_json::from_str(&text).map_err(|e| Error::MalformedLine {
            line,
            reason: format!("subset header: {e}"),
        })?;
        if header.kind != "subset" {
            return Err(Error::MalformedLine {
                line,
                reason: "first record must be the subset header".into(),
            });
        }
        let mut ids = Vec::new();
        let mut seen = HashSet::new();
        for record in lines {
            let (line, text) = record?;
            let rec: IdRecord = serde_json::from_str(&text).map_err(|e| Error::MalformedLine {
                line,
                reason: e.to_string(),
            })?;
            if !seen.insert(rec.id.clone()) {
                return Err(Error::DuplicateId { line, id: rec.id });
            }
            ids.push(rec.id);
        }
        if ids.len() != header.count {
            return Err(Error::MalformedLine {
                line,
                reason: format!("header declares {} ids, found {}", header.count, ids.len()),
            });
        }
        Ok(SubsetManifest {
            selected_ids: ids,
            provenance: Provenance {
                strategy: header.strategy,
                source_epoch: header.source_epoch,
                seed: header.seed,
                toolkit_version: header.toolkit_version,
                config: header.config,
            },
        })
    }
}
