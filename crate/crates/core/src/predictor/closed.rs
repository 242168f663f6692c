//! Whole-word backends: predict the current word over the closed vocabulary,
//! keep the words extending what has been typed of it, and marginalize over
//! the character that follows.

use crate::alphabet::Alphabet;
use crate::backend::{truncate_context, BackendKind, LanguageModel};
use crate::error::PredictError;
use crate::predictor::CharDistribution;
use crate::trie::char_after_prefix;
use crate::vocab::{TokenId, WordStart};

/// Splits a history into its complete words and the partially typed last word.
pub fn split_last_word(history: &str, boundary: char) -> (&str, &str) {
    match history.rfind(boundary) {
        Some(i) => (&history[..i], &history[i + boundary.len_utf8()..]),
        None => ("", history),
    }
}

/// Words absent from the closed vocabulary are left out of the context.
pub fn predict_closed_vocab(
    backend: &dyn LanguageModel,
    alphabet: &Alphabet,
    history: &str,
) -> Result<CharDistribution, PredictError> {
    let desc = backend.descriptor();
    if desc.kind != BackendKind::ClosedWord {
        return Err(PredictError::KindMismatch {
            strategy: "closed_vocab",
            kind: desc.kind.as_str(),
        });
    }
    let vocab = &desc.vocab;
    let b = alphabet.boundary();
    let (head, prefix) = split_last_word(history, b);
    let context: Vec<TokenId> = head
        .split(b)
        .filter(|w| !w.is_empty())
        .filter_map(|w| vocab.lookup(w, true))
        .collect();

    let candidates = vocab.trie().tokens_matching(prefix, WordStart::Any);
    if candidates.is_empty() {
        return Ok(CharDistribution::empty(alphabet.len()));
    }
    let dist = backend.next_token_dist(truncate_context(&context, desc.max_context))?;

    let mut mass = vec![0.0; alphabet.len()];
    for id in candidates {
        let next = match char_after_prefix(&vocab.token(id).surface, prefix) {
            Some(c) => alphabet.index_of(c),
            // the word is complete: what follows is a boundary
            None => Some(alphabet.boundary_index()),
        };
        if let Some(i) = next {
            mass[i] += dist.prob(id);
        }
    }
    Ok(CharDistribution::from_mass(mass))
}
