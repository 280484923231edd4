use thiserror::Error;

/// Errors produced by the toolkit. Every variant carries enough context to
/// point the user at the offending record.
#[derive(Debug, Error)]
pub enum Error {
    #[error("reference transcript is empty; word error rate is undefined")]
    EmptyReference,

    #[error("line {line}: malformed record: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: duplicate example id `{id}`")]
    DuplicateId { line: usize, id: String },

    #[error("line {line}: example `{id}` has an empty text field")]
    MissingText { line: usize, id: String },

    #[error("line {line}: unknown example id `{id}` (not in manifest)")]
    UnknownId { line: usize, id: String },

    #[error("line {line}: duplicate record for (id `{id}`, run {run}, epoch {epoch})")]
    DuplicateTriple {
        line: usize,
        id: String,
        run: u32,
        epoch: u32,
    },

    #[error("line {line}: score log mixes hypothesis and pre-scored records")]
    MixedLog { line: usize },

    #[error("epoch not present: no record carries epoch {0}")]
    EpochNotPresent(u32),

    #[error("example `{id}` is missing run(s) {missing:?} at epoch {epoch}")]
    MissingRuns {
        id: String,
        epoch: u32,
        missing: Vec<u32>,
    },

    #[error("example `{0}` has no record at the selection epoch")]
    NoScore(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("window of {window} starting {offset} from the top exceeds dataset of {len}")]
    WindowOutOfRange {
        offset: usize,
        window: usize,
        len: usize,
    },

    #[error("no phoneme transcript for example `{0}`")]
    MissingTranscript(String),

    #[error("population has no score beyond mean + k*sigma; tail inclusion is vacuous")]
    EmptyTail,

    #[error("{0}")]
    Degenerate(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
