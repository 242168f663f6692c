use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("phrase {0:?} has no target word")]
    NoTargetWord(String),
    #[error("corpus is empty")]
    Empty,
}

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("vocabulary line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("invalid vocabulary: {0}")]
    Invalid(String),
    #[error("cannot tokenize {text:?}: no token covers offset {offset}")]
    Untokenizable { text: String, offset: usize },
}

#[derive(Debug, Error)]
pub enum BackendError {
    /// The backend could not be reached or answered with a server error.
    /// `retryable` is set when repeating the same request is safe and may succeed.
    #[error("backend transport error: {message}")]
    Transport { message: String, retryable: bool },
    #[error("backend protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("invalid backend parameters: {0}")]
    Invalid(String),
}

impl BackendError {
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            BackendError::Transport {
                retryable: true,
                ..
            }
        )
    }
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("history contains {0:?}, which is outside the alphabet")]
    OutOfAlphabet(char),
    #[error("strategy {strategy} cannot drive a {kind} backend")]
    KindMismatch {
        strategy: &'static str,
        kind: &'static str,
    },
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no trial results to score")]
    Empty,
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("campaign has no instances")]
    NoInstances,
    #[error("repeats must be at least 1")]
    ZeroRepeats,
    #[error("{failed} of {total} trials failed (limit is 1%); last error: {last_error}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        last_error: String,
    },
    #[error("every trial failed")]
    NoSuccessfulTrials,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot write csv {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// Any failure of a full evaluation run.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Campaign(#[from] CampaignError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Predict(#[from] PredictError),
}
