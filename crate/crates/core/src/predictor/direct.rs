//! Character-level backends: the next-token distribution already is a
//! character distribution.

use crate::alphabet::Alphabet;
use crate::backend::{truncate_context, BackendKind, LanguageModel};
use crate::error::PredictError;
use crate::predictor::CharDistribution;

pub fn predict_direct(
    backend: &dyn LanguageModel,
    alphabet: &Alphabet,
    history: &str,
) -> Result<CharDistribution, PredictError> {
    let desc = backend.descriptor();
    if desc.kind != BackendKind::CharDirect {
        return Err(PredictError::KindMismatch {
            strategy: "direct",
            kind: desc.kind.as_str(),
        });
    }
    let vocab = &desc.vocab;
    let context = vocab.greedy_tokenize(history)?;
    let dist = backend.next_token_dist(truncate_context(&context, desc.max_context))?;

    // symbols the alphabet does not know lose their mass
    let mut mass = vec![0.0; alphabet.len()];
    for t in vocab.tokens() {
        let c = t
            .surface
            .chars()
            .next()
            .expect("character tokens are nonempty");
        if let Some(i) = alphabet.index_of(c) {
            mass[i] += dist.prob(t.id);
        }
    }
    Ok(CharDistribution::from_mass(mass))
}
