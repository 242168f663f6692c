//! Turning next-token distributions into next-character rankings.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::backend::{BackendKind, LanguageModel};
use crate::error::PredictError;

pub mod beam;
pub mod closed;
pub mod direct;
mod distribution;

pub use beam::{
    beam_search, marginalize_hypotheses, predict_beam, BeamConfig, BeamHypothesis, BeamOutcome,
};
pub use closed::predict_closed_vocab;
pub use direct::predict_direct;
pub use distribution::{CharDistribution, RankedChar};

/// Blend of the model's distribution with a character unigram.
#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationConfig {
    /// Weight on the model distribution, in `[0, 1]`.
    pub lambda: f64,
    pub unigram: CharDistribution,
}

impl InterpolationConfig {
    pub fn new(lambda: f64, unigram: CharDistribution) -> Result<Self, String> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(format!(
                "interpolation weight must lie in [0, 1], got {lambda}"
            ));
        }
        if unigram.is_empty() {
            return Err("interpolation unigram has no mass".into());
        }
        Ok(Self { lambda, unigram })
    }
}

/// `lambda * model + (1 - lambda) * unigram`, renormalized. An empty model
/// yields the unigram unchanged.
pub fn interpolate(model: &CharDistribution, cfg: &InterpolationConfig) -> CharDistribution {
    if model.is_empty() {
        return cfg.unigram.clone();
    }
    let mass = model
        .probs()
        .iter()
        .zip(cfg.unigram.probs())
        .map(|(m, u)| cfg.lambda * m + (1.0 - cfg.lambda) * u)
        .collect();
    CharDistribution::from_mass(mass)
}

/// Backend plus strategy settings. Immutable once built and shareable
/// across threads.
#[derive(Clone)]
pub struct Engine {
    alphabet: Alphabet,
    backend: Arc<dyn LanguageModel>,
    beam: BeamConfig,
    interpolation: Option<InterpolationConfig>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("kind", &self.kind())
            .field("beam", &self.beam)
            .field("lambda", &self.lambda())
            .finish()
    }
}

/// Engine settings echoed back to service clients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineSummary {
    pub kind: BackendKind,
    pub lambda: Option<f64>,
    pub beam: Option<BeamConfig>,
}

impl Engine {
    pub fn new(backend: Arc<dyn LanguageModel>, alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            backend,
            beam: BeamConfig::default(),
            interpolation: None,
        }
    }

    pub fn with_beam(mut self, beam: BeamConfig) -> Self {
        self.beam = beam;
        self
    }

    /// Ignored by character-level backends, whose output is used as is.
    pub fn with_interpolation(mut self, cfg: InterpolationConfig) -> Self {
        self.interpolation = Some(cfg);
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn backend(&self) -> &Arc<dyn LanguageModel> {
        &self.backend
    }

    pub fn kind(&self) -> BackendKind {
        self.backend.descriptor().kind
    }

    pub fn beam(&self) -> BeamConfig {
        self.beam
    }

    pub fn interpolation(&self) -> Option<&InterpolationConfig> {
        self.interpolation.as_ref()
    }

    /// The interpolation weight actually applied, if any.
    pub fn lambda(&self) -> Option<f64> {
        match self.kind() {
            BackendKind::CharDirect => None,
            _ => self.interpolation.as_ref().map(|c| c.lambda),
        }
    }

    pub fn summary(&self) -> EngineSummary {
        EngineSummary {
            kind: self.kind(),
            lambda: self.lambda(),
            beam: (self.kind() == BackendKind::Subword).then_some(self.beam),
        }
    }

    fn check_history(&self, history: &str) -> Result<(), PredictError> {
        match history.chars().find(|&c| !self.alphabet.contains(c)) {
            Some(c) => Err(PredictError::OutOfAlphabet(c)),
            None => Ok(()),
        }
    }

    /// The strategy's own output, before interpolation. May be empty.
    pub fn model_distribution(&self, history: &str) -> Result<CharDistribution, PredictError> {
        self.check_history(history)?;
        let backend = self.backend.as_ref();
        match self.kind() {
            BackendKind::CharDirect => predict_direct(backend, &self.alphabet, history),
            BackendKind::ClosedWord => predict_closed_vocab(backend, &self.alphabet, history),
            BackendKind::Subword => predict_beam(backend, &self.alphabet, history, &self.beam),
        }
    }

    /// Final distribution: interpolated where configured, never empty.
    /// An empty model distribution falls back to the unigram, or to the
    /// uniform distribution when there is none.
    pub fn distribution(&self, history: &str) -> Result<CharDistribution, PredictError> {
        let model = self.model_distribution(history)?;
        let out = match (&self.interpolation, self.kind()) {
            (Some(cfg), BackendKind::ClosedWord | BackendKind::Subword) => interpolate(&model, cfg),
            _ => model,
        };
        if !out.is_empty() {
            return Ok(out);
        }
        Ok(match &self.interpolation {
            Some(cfg) => cfg.unigram.clone(),
            None => CharDistribution::uniform(self.alphabet.len()),
        })
    }

    /// The full alphabet ranked by probability, ties in alphabet order.
    pub fn predict(&self, history: &str) -> Result<Vec<RankedChar>, PredictError> {
        Ok(self.distribution(history)?.ranked(&self.alphabet))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::NgramModel;
    use crate::text::Phrase;

    fn dist(pairs: &[(char, f64)]) -> CharDistribution {
        let a = Alphabet::default();
        let mut mass = vec![0.0; a.len()];
        for &(c, p) in pairs {
            mass[a.index_of(c).unwrap()] = p;
        }
        CharDistribution::from_mass(mass)
    }

    #[test]
    fn interpolation_arithmetic() {
        let cfg = InterpolationConfig::new(0.8, dist(&[('a', 0.5), ('b', 0.5)])).unwrap();
        let out = interpolate(&dist(&[('a', 1.0)]), &cfg);
        assert!((out.prob(0) - 0.9).abs() < 1e-15);
        assert!((out.prob(1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn interpolation_identities() {
        let model = dist(&[('a', 0.7), ('c', 0.3)]);
        let uni = dist(&[('a', 0.2), ('b', 0.8)]);
        let one = InterpolationConfig::new(1.0, uni.clone()).unwrap();
        let zero = InterpolationConfig::new(0.0, uni.clone()).unwrap();
        assert_eq!(interpolate(&model, &one), model);
        assert_eq!(interpolate(&model, &zero), uni);
        let empty = CharDistribution::empty(27);
        assert_eq!(interpolate(&empty, &one), uni);
        assert!(InterpolationConfig::new(1.5, uni).is_err());
    }

    #[test]
    fn char_direct_bypasses_interpolation() {
        let a = Alphabet::default();
        let p = [Phrase::new("ab", "x", &a).unwrap()];
        let m = NgramModel::train_chars(&p, &a, 1, 0.0).unwrap();
        let cfg = InterpolationConfig::new(0.5, CharDistribution::uniform(27)).unwrap();
        let engine = Engine::new(Arc::new(m), a.clone()).with_interpolation(cfg);
        let d = engine.distribution("").unwrap();
        assert_eq!(d.prob(0), 0.5);
        assert_eq!(engine.lambda(), None);
    }

    #[test]
    fn empty_model_falls_back_to_unigram() {
        let a = Alphabet::default();
        let p = [Phrase::new("the cat", "x", &a).unwrap()];
        let m = NgramModel::train_words(&p, &a, 1, 1.0).unwrap();
        let uni = CharDistribution::unigram(&p, &a, 1.0);
        let engine = Engine::new(Arc::new(m), a.clone())
            .with_interpolation(InterpolationConfig::new(0.8, uni.clone()).unwrap());
        assert_eq!(engine.distribution("zq").unwrap(), uni);
        let bare = Engine::new(engine.backend().clone(), a.clone());
        let ranked = bare.predict("zq").unwrap();
        assert_eq!(ranked.len(), 27);
        assert_eq!(ranked[0].ch, 'a');
    }

    #[test]
    fn rejects_out_of_alphabet_history() {
        let a = Alphabet::default();
        let p = [Phrase::new("ab", "x", &a).unwrap()];
        let engine = Engine::new(
            Arc::new(NgramModel::train_chars(&p, &a, 2, 1.0).unwrap()),
            a,
        );
        assert!(matches!(
            engine.predict("Ab"),
            Err(PredictError::OutOfAlphabet('A'))
        ));
    }
}
