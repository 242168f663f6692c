//! Service, model server and command line around [`charpilot_core`].

pub mod backend_server;
pub mod cli;
pub mod service;

use charpilot_core::error::{ConfigError, PredictError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] ConfigError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Corpus(#[from] charpilot_core::error::CorpusError),
    #[error(transparent)]
    Evaluate(#[from] charpilot_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
