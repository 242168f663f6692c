//! Next-token probability oracles.
//!
//! Built-in backends are count-based n-gram models; [`remote::RemoteBackend`]
//! reaches an external model server over the JSON wire protocol in
//! [`protocol`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::BackendError;
use crate::vocab::{PartialSplit, TokenId, VocabKind, Vocabulary};

pub mod ngram;
pub mod protocol;
pub mod remote;

pub use ngram::{train_ngram, NgramModel};
pub use remote::RemoteBackend;

/// How a backend's tokens relate to characters, which decides the
/// prediction strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    CharDirect,
    ClosedWord,
    Subword,
}

impl BackendKind {
    pub fn vocab_kind(self) -> VocabKind {
        match self {
            BackendKind::CharDirect => VocabKind::Character,
            BackendKind::ClosedWord => VocabKind::ClosedWord,
            BackendKind::Subword => VocabKind::Subword,
        }
    }

    pub fn from_vocab_kind(kind: VocabKind) -> Self {
        match kind {
            VocabKind::Character => BackendKind::CharDirect,
            VocabKind::ClosedWord => BackendKind::ClosedWord,
            VocabKind::Subword => BackendKind::Subword,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::CharDirect => "char_direct",
            BackendKind::ClosedWord => "closed_word",
            BackendKind::Subword => "subword",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BackendDescriptor {
    pub kind: BackendKind,
    pub vocab: Arc<Vocabulary>,
    /// Longest context (in tokens) the backend conditions on.
    pub max_context: usize,
    pub deterministic: bool,
}

impl BackendDescriptor {
    pub fn new(vocab: Arc<Vocabulary>, max_context: usize, deterministic: bool) -> Self {
        Self {
            kind: BackendKind::from_vocab_kind(vocab.kind()),
            vocab,
            max_context,
            deterministic,
        }
    }
}

/// Dense next-token distribution indexed by token id.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenDistribution {
    probs: Vec<f64>,
}

impl TokenDistribution {
    /// Normalizes nonnegative weights. Fails on negative or non-finite
    /// entries and on zero total mass.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self, BackendError> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(BackendError::Protocol(format!(
                "invalid probability weight {w}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(BackendError::Protocol("distribution has no mass".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { probs: weights })
    }

    /// From natural-log probabilities; `None` stands for probability zero.
    /// Shifts by the maximum before exponentiating.
    pub fn from_logprobs(logprobs: &[Option<f64>]) -> Result<Self, BackendError> {
        let max = logprobs
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(BackendError::Protocol(
                "distribution has no finite log-probability".into(),
            ));
        }
        if logprobs
            .iter()
            .flatten()
            .any(|lp| lp.is_nan() || *lp > 0.0 + 1e-9)
        {
            return Err(BackendError::Protocol(
                "log-probabilities must be finite and at most zero".into(),
            ));
        }
        let weights = logprobs
            .iter()
            .map(|lp| lp.map_or(0.0, |lp| (lp - max).exp()))
            .collect();
        Self::from_weights(weights)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, id: TokenId) -> f64 {
        self.probs[id.index()]
    }

    pub fn ln_prob(&self, id: TokenId) -> f64 {
        self.probs[id.index()].ln()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn to_logprobs(&self) -> Vec<Option<f64>> {
        self.probs
            .iter()
            .map(|&p| (p > 0.0).then(|| p.ln()))
            .collect()
    }
}

/// Uniform interface over every backend the engine can drive.
pub trait LanguageModel: Send + Sync {
    fn descriptor(&self) -> &BackendDescriptor;

    /// Distribution over the next token given `context`. Contexts longer than
    /// `max_context` are truncated from the left.
    fn next_token_dist(&self, context: &[TokenId]) -> Result<TokenDistribution, BackendError>;

    /// The backend's own committed/partial split of `history`, when it has a
    /// tokenizer of its own. `None` means greedy segmentation applies.
    fn split_history(&self, _history: &str) -> Option<Result<PartialSplit, BackendError>> {
        None
    }
}

impl<T: LanguageModel + ?Sized> LanguageModel for Arc<T> {
    fn descriptor(&self) -> &BackendDescriptor {
        (**self).descriptor()
    }

    fn next_token_dist(&self, context: &[TokenId]) -> Result<TokenDistribution, BackendError> {
        (**self).next_token_dist(context)
    }

    fn split_history(&self, history: &str) -> Option<Result<PartialSplit, BackendError>> {
        (**self).split_history(history)
    }
}

/// Backend computing its weights with a closure; handy for fixtures and
/// for wrapping models that live elsewhere in-process.
pub struct FnModel<F> {
    descriptor: BackendDescriptor,
    weights: F,
}

impl<F> FnModel<F>
where
    F: Fn(&[TokenId]) -> Vec<f64> + Send + Sync,
{
    /// `weights` receives the truncated context and returns one nonnegative
    /// weight per token id; they are normalized on the way out.
    pub fn new(vocab: Arc<Vocabulary>, max_context: usize, weights: F) -> Self {
        Self {
            descriptor: BackendDescriptor::new(vocab, max_context, true),
            weights,
        }
    }
}

impl<F> LanguageModel for FnModel<F>
where
    F: Fn(&[TokenId]) -> Vec<f64> + Send + Sync,
{
    fn descriptor(&self) -> &BackendDescriptor {
        &self.descriptor
    }

    fn next_token_dist(&self, context: &[TokenId]) -> Result<TokenDistribution, BackendError> {
        let ctx = truncate_context(context, self.descriptor.max_context);
        let w = (self.weights)(ctx);
        if w.len() != self.descriptor.vocab.len() {
            return Err(BackendError::Protocol(format!(
                "expected {} weights, got {}",
                self.descriptor.vocab.len(),
                w.len()
            )));
        }
        TokenDistribution::from_weights(w)
    }
}

/// Keeps the most recent `max_context` tokens.
pub fn truncate_context(context: &[TokenId], max_context: usize) -> &[TokenId] {
    &context[context.len().saturating_sub(max_context)..]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logprobs_round_trip_with_zeros() {
        let d = TokenDistribution::from_weights(vec![0.5, 0.0, 0.5]).unwrap();
        let lp = d.to_logprobs();
        assert_eq!(lp[1], None);
        let back = TokenDistribution::from_logprobs(&lp).unwrap();
        assert!((back.probs()[0] - 0.5).abs() < 1e-15);
        assert_eq!(back.probs()[1], 0.0);
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(TokenDistribution::from_weights(vec![0.0, 0.0]).is_err());
        assert!(TokenDistribution::from_weights(vec![-0.1, 1.1]).is_err());
        assert!(TokenDistribution::from_logprobs(&[None, None]).is_err());
        assert!(TokenDistribution::from_logprobs(&[Some(0.5)]).is_err());
    }

    #[test]
    fn extreme_logprobs_do_not_underflow() {
        let d =
            TokenDistribution::from_logprobs(&[Some(-2000.0), Some(-2000.0 - 2f64.ln())]).unwrap();
        assert!((d.probs()[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_keeps_recent_tokens() {
        let ctx: Vec<TokenId> = (0..5).map(TokenId).collect();
        assert_eq!(truncate_context(&ctx, 2), &ctx[3..]);
        assert_eq!(truncate_context(&ctx, 9), &ctx[..]);
        assert!(truncate_context(&ctx, 0).is_empty());
    }
}
