//! File-to-file commands with run records.
//!
//! Each command reads its inputs, produces one output file and writes a run
//! record (`<output>.run.json`) next to it with the command, input and
//! output SHA-256 digests, toolkit version and a timestamp. Outputs are
//! written to a temporary file in the target directory and renamed into
//! place, so a failed command never leaves a partial output behind.
//!
//! [`replay`] re-executes a recorded command and checks that the inputs and
//! the output still hash to the recorded digests.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::manifest::DatasetManifest;
use crate::mwu::MwuResult;
use crate::phoneme::{compare_subset_distributions, cover_wer_profile, CoverProfile};
use crate::pruning::{
    prune, score_by_length, BucketMode, PruneConfig, PruningFraction, Strategy, SubsetManifest,
    DEFAULT_SELECTION_EPOCH, TOOLKIT_VERSION,
};
use crate::scores::{average_at_epoch, ingest_scores, MissingPolicy, ScoreMatrix};
use crate::simulation::{
    simulate_mean_variance, simulate_tail_inclusion, MeanVarianceConfig, SimulationReport,
    SyntheticDistribution, TailInclusionConfig,
};
use crate::wer::NormalizationPolicy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreArgs {
    pub manifest: PathBuf,
    pub log: PathBuf,
    pub epoch: u32,
    #[serde(default)]
    pub missing: MissingPolicy,
    #[serde(default)]
    pub normalization: NormalizationPolicy,
    pub output: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneArgs {
    /// Score matrix written by the score command.
    pub scores: Option<PathBuf>,
    /// Manifest, for length-based cowerage or scoring `log` on the fly.
    pub manifest: Option<PathBuf>,
    /// Hypothesis log, scored at `epoch` when no score matrix is given.
    #[serde(default)]
    pub log: Option<PathBuf>,
    /// Selection epoch. Checked against the score matrix when both are given.
    #[serde(default)]
    pub epoch: Option<u32>,
    pub config: PruneConfig,
    pub output: PathBuf,
}

impl PruneArgs {
    fn load_scores(&self) -> Result<ScoreMatrix> {
        let manifest = || -> Result<DatasetManifest> {
            let path = self
                .manifest
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("a manifest is required".into()))?;
            DatasetManifest::parse(read(path)?.as_slice())
        };
        if self.config.strategy == Strategy::LengthCowerage {
            return score_by_length(&manifest()?);
        }
        if let Some(path) = &self.scores {
            let scores = ScoreMatrix::parse(read(path)?.as_slice())?;
            if let Some(epoch) = self.epoch.filter(|&e| e != scores.epoch) {
                return Err(Error::InvalidConfig(format!(
                    "score matrix is from epoch {}, not {epoch}",
                    scores.epoch
                )));
            }
            return Ok(scores);
        }
        let log_path = self.log.as_ref().ok_or_else(|| {
            Error::InvalidConfig("prune needs a score matrix or a manifest and log".into())
        })?;
        let manifest = manifest()?;
        let log = ingest_scores(read(log_path)?.as_slice(), &manifest)?;
        average_at_epoch(
            &log,
            &manifest,
            self.epoch.unwrap_or(DEFAULT_SELECTION_EPOCH),
            MissingPolicy::Strict,
            NormalizationPolicy::default(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    pub manifest: PathBuf,
    pub scores: PathBuf,
    /// Two subsets whose phonemic covers are compared.
    pub compare: Option<(PathBuf, PathBuf)>,
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulationKind {
    TailInclusion,
    MeanVariance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateArgs {
    pub kind: SimulationKind,
    /// Distribution string, see [`SyntheticDistribution`]'s `FromStr`.
    pub dist: String,
    pub population: usize,
    pub fraction: PruningFraction,
    pub k: f64,
    pub bucket_size: usize,
    pub bucket_mode: BucketMode,
    pub trials: usize,
    pub seed: u64,
    pub with_replacement: bool,
    pub output: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Score(ScoreArgs),
    Prune(PruneArgs),
    Analyze(AnalyzeArgs),
    Simulate(SimulateArgs),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: Command,
    /// SHA-256 of each input file, keyed by path.
    pub inputs: BTreeMap<String, String>,
    pub output: String,
    pub output_sha256: String,
    pub toolkit_version: String,
    pub unix_time: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub cover_profile: CoverProfile,
    pub comparison: Option<MwuResult>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

impl Command {
    pub fn output(&self) -> &Path {
        match self {
            Command::Score(a) => &a.output,
            Command::Prune(a) => &a.output,
            Command::Analyze(a) => &a.output,
            Command::Simulate(a) => &a.output,
        }
    }

    pub fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Score(a) => vec![&a.manifest, &a.log],
            Command::Prune(a) => a
                .scores
                .iter()
                .chain(&a.manifest)
                .chain(&a.log)
                .map(PathBuf::as_path)
                .collect(),
            Command::Analyze(a) => {
                let mut v = vec![a.manifest.as_path(), a.scores.as_path()];
                if let Some((x, y)) = &a.compare {
                    v.push(x);
                    v.push(y);
                }
                v
            }
            Command::Simulate(_) => Vec::new(),
        }
    }

    /// Runs the command and returns the output bytes without writing them.
    pub fn execute(&self) -> Result<Vec<u8>> {
        match self {
            Command::Score(a) => {
                let manifest = DatasetManifest::parse(read(&a.manifest)?.as_slice())?;
                let log = ingest_scores(read(&a.log)?.as_slice(), &manifest)?;
                let matrix =
                    average_at_epoch(&log, &manifest, a.epoch, a.missing, a.normalization)?;
                Ok(matrix.to_jsonl().into_bytes())
            }
            Command::Prune(a) => {
                let mut subset = prune(&a.load_scores()?, &a.config)?;
                if a.config.strategy == Strategy::LengthCowerage {
                    subset = subset.with_source_epoch(None);
                }
                Ok(subset.to_jsonl().into_bytes())
            }
            Command::Analyze(a) => {
                let manifest = DatasetManifest::parse(read(&a.manifest)?.as_slice())?;
                let scores = ScoreMatrix::parse(read(&a.scores)?.as_slice())?;
                let transcripts = manifest.transcripts();
                let comparison = match &a.compare {
                    Some((x, y)) => Some(compare_subset_distributions(
                        &SubsetManifest::parse(read(x)?.as_slice())?,
                        &SubsetManifest::parse(read(y)?.as_slice())?,
                        &transcripts,
                    )?),
                    None => None,
                };
                let report = AnalysisReport {
                    cover_profile: cover_wer_profile(&scores, &transcripts)?,
                    comparison,
                };
                let mut out = serde_json::to_vec(&report)?;
                out.push(b'\n');
                Ok(out)
            }
            Command::Simulate(a) => Ok(simulate(a)?.to_json_line().into_bytes()),
        }
    }
}

pub fn simulate(a: &SimulateArgs) -> Result<SimulationReport> {
    let dist: SyntheticDistribution = a.dist.parse()?;
    Ok(match a.kind {
        SimulationKind::TailInclusion => SimulationReport::TailInclusion(simulate_tail_inclusion(
            &dist,
            &TailInclusionConfig {
                population: a.population,
                fraction: a.fraction,
                k: a.k,
                bucket_size: a.bucket_size,
                bucket_mode: a.bucket_mode,
                trials: a.trials,
                seed: a.seed,
            },
        )?),
        SimulationKind::MeanVariance => SimulationReport::MeanVariance(simulate_mean_variance(
            &dist,
            &MeanVarianceConfig {
                population: a.population,
                fraction: a.fraction,
                bucket_size: a.bucket_size,
                trials: a.trials,
                seed: a.seed,
                with_replacement: a.with_replacement,
            },
        )?),
    })
}

/// Path of the run record for `output`.
pub fn record_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".run.json");
    output.with_file_name(name)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn digest_inputs(command: &Command) -> Result<BTreeMap<String, String>> {
    command
        .inputs()
        .into_iter()
        .map(|p| Ok((p.display().to_string(), sha256_hex(&read(p)?))))
        .collect()
}

/// Executes `command`, writes its output and run record, and returns the
/// record.
pub fn run_pipeline(command: &Command) -> Result<RunRecord> {
    let inputs = digest_inputs(command)?;
    let bytes = command.execute()?;
    let output = command.output();
    let record = RunRecord {
        command: command.clone(),
        inputs,
        output: output.display().to_string(),
        output_sha256: sha256_hex(&bytes),
        toolkit_version: TOOLKIT_VERSION.to_owned(),
        unix_time: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    write_atomic(output, &bytes)?;
    let mut json = serde_json::to_vec_pretty(&record)?;
    json.push(b'\n');
    if let Err(e) = write_atomic(&record_path(output), &json) {
        let _ = fs::remove_file(output);
        return Err(e);
    }
    Ok(record)
}

pub fn load_record(path: &Path) -> Result<RunRecord> {
    Ok(serde_json::from_slice(&read(path)?)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome {
    /// Inputs whose digest no longer matches.
    pub changed_inputs: Vec<String>,
    pub output_sha256: String,
    pub output_matches: bool,
}

impl ReplayOutcome {
    pub fn is_identical(&self) -> bool {
        self.changed_inputs.is_empty() && self.output_matches
    }
}

/// Re-executes the recorded command without touching the recorded output.
pub fn replay(record: &RunRecord) -> Result<ReplayOutcome> {
    let now = digest_inputs(&record.command)?;
    let changed_inputs = record
        .inputs
        .iter()
        .filter(|(path, digest)| now.get(*path) != Some(digest))
        .map(|(path, _)| path.clone())
        .collect();
    let output_sha256 = sha256_hex(&record.command.execute()?);
    Ok(ReplayOutcome {
        changed_inputs,
        output_matches: output_sha256 == record.output_sha256,
        output_sha256,
    })
}
