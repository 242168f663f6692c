//! Subword backends: beam search over continuations of the partial token.
//!
//! The history is split into committed tokens and a trailing partial token.
//! The first step only admits tokens extending the partial. A hypothesis
//! whose rendered surface goes beyond the partial is frozen: its next
//! character is known. One that matches the partial exactly is expanded over
//! the whole vocabulary on the next step, where a word-initial token yields
//! the boundary as next character. Each step keeps the `beam_size` best new
//! hypotheses by cumulative log-probability; frozen hypotheses stay for the
//! final marginalization even if later steps would have outranked them.
//! Exact matches left when the depth budget runs out are dropped.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::backend::{truncate_context, BackendKind, LanguageModel};
use crate::error::PredictError;
use crate::predictor::CharDistribution;
use crate::trie::char_after_prefix;
use crate::vocab::{PartialSplit, TokenId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamConfig {
    pub beam_size: usize,
    pub depth: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        Self {
            beam_size: 20,
            depth: 2,
        }
    }
}

impl BeamConfig {
    pub fn new(beam_size: usize, depth: usize) -> Result<Self, String> {
        let cfg = Self { beam_size, depth };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.beam_size == 0 || self.depth == 0 {
            return Err(format!(
                "beam size and depth must be at least 1 (got {} and {})",
                self.beam_size, self.depth
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamHypothesis {
    /// Tokens generated after the committed context.
    pub token_ids: Vec<TokenId>,
    pub logprob: f64,
    /// Concatenated rendered surfaces (boundaries included).
    pub surface: String,
}

/// Result of a search: the pending text and the frozen hypotheses.
#[derive(Clone, Debug)]
pub struct BeamOutcome {
    pub split: PartialSplit,
    /// The partial as rendered text; every hypothesis surface extends it.
    pub pending: String,
    pub hypotheses: Vec<BeamHypothesis>,
}

fn by_score(a: &BeamHypothesis, b: &BeamHypothesis) -> Ordering {
    b.logprob
        .total_cmp(&a.logprob)
        .then_with(|| a.token_ids.cmp(&b.token_ids))
}

fn keep_best(mut candidates: Vec<BeamHypothesis>, beam_size: usize) -> Vec<BeamHypothesis> {
    if candidates.len() > beam_size {
        candidates.select_nth_unstable_by(beam_size - 1, by_score);
        candidates.truncate(beam_size);
    }
    candidates.sort_by(by_score);
    candidates
}

/// Committed/partial split, preferring the backend's own tokenizer.
pub fn split_for(backend: &dyn LanguageModel, history: &str) -> Result<PartialSplit, PredictError> {
    match backend.split_history(history) {
        Some(r) => Ok(r?),
        None => Ok(backend.descriptor().vocab.find_partial_suffix(history)?),
    }
}

pub fn beam_search(
    backend: &dyn LanguageModel,
    alphabet: &Alphabet,
    history: &str,
    cfg: &BeamConfig,
) -> Result<BeamOutcome, PredictError> {
    let desc = backend.descriptor();
    if desc.kind != BackendKind::Subword {
        return Err(PredictError::KindMismatch {
            strategy: "beam",
            kind: desc.kind.as_str(),
        });
    }
    cfg.validate().map_err(PredictError::InvalidConfig)?;
    let vocab = &desc.vocab;
    let split = split_for(backend, history)?;
    let pending = split.pending(alphabet.boundary());
    let rendered: Vec<String> = vocab
        .tokens()
        .iter()
        .map(|t| vocab.rendered(t.id))
        .collect();

    let dist = backend.next_token_dist(truncate_context(&split.committed, desc.max_context))?;
    let mut candidates: Vec<BeamHypothesis> = vocab
        .trie()
        .tokens_matching(&split.partial, split.word_start)
        .into_iter()
        .filter(|&id| dist.prob(id) > 0.0)
        .map(|id| BeamHypothesis {
            token_ids: vec![id],
            logprob: dist.ln_prob(id),
            surface: rendered[id.index()].clone(),
        })
        .collect();

    let mut frozen = Vec::new();
    for step in 1..=cfg.depth {
        let beam = keep_best(std::mem::take(&mut candidates), cfg.beam_size);
        let (done, active): (Vec<_>, Vec<_>) = beam
            .into_iter()
            .partition(|h| h.surface.len() > pending.len());
        frozen.extend(done);
        if step == cfg.depth || active.is_empty() {
            break;
        }
        for h in active {
            let mut context = split.committed.clone();
            context.extend_from_slice(&h.token_ids);
            let dist = backend.next_token_dist(truncate_context(&context, desc.max_context))?;
            for (i, &p) in dist.probs().iter().enumerate() {
                if p > 0.0 {
                    let id = TokenId(i as u32);
                    let mut token_ids = h.token_ids.clone();
                    token_ids.push(id);
                    candidates.push(BeamHypothesis {
                        token_ids,
                        logprob: h.logprob + p.ln(),
                        surface: format!("{}{}", h.surface, rendered[i]),
                    });
                }
            }
        }
    }

    Ok(BeamOutcome {
        split,
        pending,
        hypotheses: frozen,
    })
}

/// Groups hypothesis mass by the character right after `pending`, in log
/// space with a max shift, then renormalizes. Characters outside the
/// alphabet lose their mass.
pub fn marginalize_hypotheses(
    hypotheses: &[BeamHypothesis],
    pending: &str,
    alphabet: &Alphabet,
) -> CharDistribution {
    let max = hypotheses
        .iter()
        .map(|h| h.logprob)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut mass = vec![0.0; alphabet.len()];
    if max.is_finite() {
        for h in hypotheses {
            let next = char_after_prefix(&h.surface, pending).and_then(|c| alphabet.index_of(c));
            if let Some(i) = next {
                mass[i] += (h.logprob - max).exp();
            }
        }
    }
    CharDistribution::from_mass(mass)
}

pub fn predict_beam(
    backend: &dyn LanguageModel,
    alphabet: &Alphabet,
    history: &str,
    cfg: &BeamConfig,
) -> Result<CharDistribution, PredictError> {
    let outcome = beam_search(backend, alphabet, history, cfg)?;
    Ok(marginalize_hypotheses(
        &outcome.hypotheses,
        &outcome.pending,
        alphabet,
    ))
}
