use std::io;

use thiserror::Error;

/// Errors raised while reading or validating input data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("taxonomy error: {0}")]
    Taxonomy(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("duplicate article id {0:?}")]
    DuplicateArticle(String),

    #[error("embedding table: {0}")]
    Embedding(String),

    #[error("no embedded token in label of {0}")]
    AllOutOfVocabulary(String),

    #[error("WET {0} has no mapped articles")]
    UnmappedWet(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("clustering needs at least two WETs, got {0}")]
    TooFewWets(usize),

    #[error("gold standard is empty")]
    EmptyGold,

    #[error("N-Triples line {line}: {message}")]
    NTriples { line: usize, message: String },

    #[error("{0}")]
    Config(String),

    #[error("snapshot {path}: {message}")]
    Snapshot { path: String, message: String },

    #[error("triple store is frozen")]
    Frozen,

    #[error("{kind} {id:?} not found")]
    NotFound { kind: &'static str, id: String },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("unknown schema {0:?}")]
    UnknownSchema(String),

    #[error("unknown property {0:?}")]
    UnknownProperty(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
