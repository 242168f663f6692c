//! Engine and campaign configuration files (TOML, or JSON by extension).
//!
//! Relative paths inside a file resolve against the file's directory.
//!
//! ```toml
//! label = "Char 5-gram"
//!
//! [backend]
//! kind = "char_direct"
//! corpus = "train.txt"
//! order = 5
//!
//! [interpolation]
//! lambda = 0.8
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::backend::{train_ngram, BackendKind, LanguageModel, RemoteBackend};
use crate::corpus::{load_corpus_with, CorpusFormat, TranscriptOptions};
use crate::error::ConfigError;
use crate::noise::NoiseSpec;
use crate::predictor::{BeamConfig, CharDistribution, Engine, InterpolationConfig};
use crate::report::ReportFormat;
use crate::text::{ContractionTable, Normalizer, Phrase};
use crate::vocab::Vocabulary;

fn default_order() -> usize {
    3
}
fn default_smoothing() -> f64 {
    0.01
}
fn default_timeout_ms() -> u64 {
    10_000
}
fn default_vocab_words() -> usize {
    2000
}
fn default_vocab_pieces() -> usize {
    400
}
fn default_unigram_smoothing() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// Training corpus for a built-in n-gram backend.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub corpus_format: CorpusFormat,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Add-k smoothing constant.
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    /// Token vocabulary (TSV). Subword backends derive one from the corpus
    /// when absent; remote backends fetch it from the server.
    #[serde(default)]
    pub vocab: Option<PathBuf>,
    #[serde(default = "default_vocab_words")]
    pub vocab_words: usize,
    #[serde(default = "default_vocab_pieces")]
    pub vocab_pieces: usize,
    /// Base URL of an external backend; overrides `corpus`.
    #[serde(default)]
    pub url: Option<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_format() -> CorpusFormat {
    CorpusFormat::PhraseLines
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSection {
    pub size: usize,
    pub depth: usize,
}

impl Default for BeamSection {
    fn default() -> Self {
        let b = BeamConfig::default();
        Self {
            size: b.beam_size,
            depth: b.depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolationSection {
    pub lambda: f64,
    /// Corpus for the character unigram; defaults to the backend corpus.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    #[serde(default = "default_unigram_smoothing")]
    pub smoothing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    /// Row label in reports.
    #[serde(default)]
    pub label: Option<String>,
    /// Letters of the alphabet; the boundary is always a space.
    #[serde(default)]
    pub alphabet: Option<String>,
    /// Contraction table replacing the built-in one.
    #[serde(default)]
    pub contractions: Option<PathBuf>,
    /// Extra words dropped from transcripts.
    #[serde(default)]
    pub interjections: Vec<String>,
    pub backend: BackendConfig,
    #[serde(default)]
    pub beam: BeamSection,
    #[serde(default)]
    pub interpolation: Option<InterpolationSection>,
}

/// The backend plus, for built-in backends, its training phrases.
type BuiltBackend = (Arc<dyn LanguageModel>, Option<Vec<Phrase>>);

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |message: String| ConfigError::Parse {
        path: path.to_path_buf(),
        message,
    };
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))
    } else {
        toml::from_str(&text).map_err(|e| parse_err(e.to_string()))
    }
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

impl EngineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<string>"),
            message: e.to_string(),
        })
    }

    /// Reads the file and makes its relative paths absolute.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut cfg: Self = read_config(path)?;
        cfg.resolve_paths(&base_dir(path));
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(x) = p {
                *x = resolve(base, x);
            }
        };
        fix(&mut self.contractions);
        fix(&mut self.backend.corpus);
        fix(&mut self.backend.vocab);
        if let Some(i) = &mut self.interpolation {
            fix(&mut i.corpus);
        }
    }

    pub fn alphabet(&self) -> Result<Alphabet, ConfigError> {
        match &self.alphabet {
            None => Ok(Alphabet::default()),
            Some(letters) => Alphabet::new(letters.chars().chain([' ']), ' '),
        }
    }

    pub fn normalizer(&self) -> Result<Normalizer, ConfigError> {
        let table = match &self.contractions {
            Some(p) => ContractionTable::load(p)?,
            None => ContractionTable::builtin(),
        };
        Ok(Normalizer::new(self.alphabet()?, table)
            .with_interjections(self.interjections.iter().cloned()))
    }

    /// Label used in reports when none is configured.
    pub fn display_label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let b = &self.backend;
        match (&b.url, b.kind) {
            (Some(url), kind) => format!("{} @ {url}", kind.as_str()),
            (None, BackendKind::CharDirect) if b.order == 1 => "Unigram Baseline".into(),
            (None, kind) => format!("{} {}-gram", kind.as_str(), b.order),
        }
    }

    fn load_phrases(
        &self,
        path: &Path,
        normalizer: &Normalizer,
    ) -> Result<Vec<Phrase>, ConfigError> {
        let phrases = load_corpus_with(
            normalizer,
            path,
            self.backend.corpus_format,
            &TranscriptOptions::default(),
        )?;
        if phrases.is_empty() {
            return Err(ConfigError::Invalid(format!(
                "corpus {} has no phrases",
                path.display()
            )));
        }
        Ok(phrases)
    }

    fn build_backend(
        &self,
        alphabet: &Alphabet,
        normalizer: &Normalizer,
    ) -> Result<BuiltBackend, ConfigError> {
        let b = &self.backend;
        let vocab = match &b.vocab {
            Some(p) => Some(Vocabulary::load_tsv(p, b.kind.vocab_kind(), alphabet)?),
            None => None,
        };
        if let Some(url) = &b.url {
            let remote =
                RemoteBackend::connect(url, vocab, alphabet, Duration::from_millis(b.timeout_ms))?;
            if remote.descriptor().kind != b.kind {
                return Err(ConfigError::Invalid(format!(
                    "configured kind {} but {url} serves {}",
                    b.kind.as_str(),
                    remote.descriptor().kind.as_str()
                )));
            }
            return Ok((Arc::new(remote), None));
        }
        let corpus_path = b
            .corpus
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("backend needs either `url` or `corpus`".into()))?;
        let phrases = self.load_phrases(corpus_path, normalizer)?;
        let subword_vocab = match (b.kind, vocab) {
            (BackendKind::Subword, Some(v)) => Some(Arc::new(v)),
            (BackendKind::Subword, None) => Some(Arc::new(Vocabulary::subword_from_corpus(
                &phrases,
                alphabet,
                b.vocab_words,
                b.vocab_pieces,
            )?)),
            _ => None,
        };
        let model = train_ngram(
            &phrases,
            b.kind,
            alphabet,
            subword_vocab,
            b.order,
            b.smoothing,
        )?;
        Ok((Arc::new(model), Some(phrases)))
    }

    /// Loads corpora, trains or connects to the backend and assembles the engine.
    pub fn build(&self) -> Result<Engine, ConfigError> {
        let alphabet = self.alphabet()?;
        let normalizer = self.normalizer()?;
        let (backend, train_phrases) = self.build_backend(&alphabet, &normalizer)?;
        let beam =
            BeamConfig::new(self.beam.size, self.beam.depth).map_err(ConfigError::Invalid)?;
        let mut engine = Engine::new(backend, alphabet.clone()).with_beam(beam);
        if let Some(i) = &self.interpolation {
            let phrases = match (&i.corpus, train_phrases) {
                (Some(p), _) => self.load_phrases(p, &normalizer)?,
                (None, Some(p)) => p,
                (None, None) => {
                    return Err(ConfigError::Invalid(
                        "interpolation with a remote backend needs `interpolation.corpus`".into(),
                    ))
                }
            };
            let unigram = CharDistribution::unigram(&phrases, &alphabet, i.smoothing);
            let cfg = InterpolationConfig::new(i.lambda, unigram).map_err(ConfigError::Invalid)?;
            engine = engine.with_interpolation(cfg);
        }
        Ok(engine)
    }
}

impl Engine {
    pub fn from_config(cfg: &EngineConfig) -> Result<Engine, ConfigError> {
        cfg.build()
    }
}

fn default_repeats() -> usize {
    1
}
fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Csv, ReportFormat::Table, ReportFormat::Json]
}

/// Evaluation run: engine, dataset, optional noise, repeats and output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub engine: PathBuf,
    pub dataset: PathBuf,
    #[serde(default = "default_format")]
    pub format: CorpusFormat,
    #[serde(default)]
    pub transcript: TranscriptOptions,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    pub out: PathBuf,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut cfg: Self = read_config(path)?;
        let base = base_dir(path);
        cfg.engine = resolve(&base, &cfg.engine);
        cfg.dataset = resolve(&base, &cfg.dataset);
        cfg.out = resolve(&base, &cfg.out);
        if let Some(n) = &cfg.noise {
            NoiseSpec::new(n.rate, n.seed).map_err(ConfigError::Invalid)?;
        }
        Ok(cfg)
    }
}
