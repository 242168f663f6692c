//! Next-character prediction from character, word and subword language models.
//!
//! An [`Engine`] wraps a backend ([`backend::LanguageModel`]) and turns its
//! next-token distributions into a ranking of the alphabet's characters.
//! Character backends are read directly, closed-vocabulary word backends
//! are marginalized over the words matching the partial word, and subword
//! backends go through a small beam search.
//!
//! ```
//! use std::sync::Arc;
//! use charpilot_core::{Alphabet, Engine, backend::NgramModel, text::Phrase};
//!
//! let alphabet = Alphabet::default();
//! let corpus: Vec<Phrase> = ["go home", "go now", "good night"]
//!     .iter()
//!     .map(|t| Phrase::new(*t, "doc", &alphabet).unwrap())
//!     .collect();
//! let model = NgramModel::train_chars(&corpus, &alphabet, 3, 0.01).unwrap();
//! let engine = Engine::new(Arc::new(model), alphabet);
//! let ranking = engine.predict("go h").unwrap();
//! assert_eq!(ranking[0].ch, 'o');
//! assert_eq!(ranking.len(), 27);
//! ```

pub mod alphabet;
pub mod backend;
pub mod campaign;
pub mod config;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod predictor;
pub mod report;
pub mod text;
pub mod trie;
pub mod vocab;

pub use alphabet::Alphabet;
pub use campaign::{evaluate, run_campaign, CampaignOutcome, Evaluation};
pub use config::{CampaignConfig, EngineConfig};
pub use error::Error;
pub use metrics::{DeltaReport, MetricRow, MetricsReport, TrialResult};
pub use noise::{corrupt, NoiseSpec};
pub use predictor::{BeamConfig, CharDistribution, Engine, InterpolationConfig, RankedChar};
pub use text::{normalize, Phrase, PredictionInstance, Profile};
pub use vocab::{TokenId, VocabKind, Vocabulary};
