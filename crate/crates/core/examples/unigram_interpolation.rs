// Mixing an engine's distribution with a character unigram, which keeps
// every character reachable when the model has no match.
//
// `cargo run -p charpilot-core --example unigram_interpolation`

use std::error::Error;
use std::sync::Arc;

use charpilot_core::backend::NgramModel;
use charpilot_core::{Alphabet, CharDistribution, Engine, InterpolationConfig, Phrase};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::default();
    let corpus = ["good morning", "good night", "thank you"]
        .iter()
        .map(|t| Phrase::new(*t, "demo", &alphabet))
        .collect::<Result<Vec<_>, _>>()?;
    let words = NgramModel::train_words(&corpus, &alphabet, 2, 0.01)?;
    let unigram = CharDistribution::unigram(&corpus, &alphabet, 1.0);

    let plain = Engine::new(Arc::new(words.clone()), alphabet.clone());
    let mixed = Engine::new(Arc::new(words), alphabet.clone())
        .with_interpolation(InterpolationConfig::new(0.8, unigram)?);

    // no vocabulary word starts with "zq"
    let history = "good zq";
    let empty = plain.model_distribution(history)?;
    let filled = mixed.distribution(history)?;
    println!("word model alone: empty = {}", empty.is_empty());
    println!("interpolated top: {:?}", mixed.predict(history)?[0].ch);
    assert!(empty.is_empty());
    assert!((filled.sum() - 1.0).abs() < 1e-9);

    let history = "good n";
    let p_plain = plain
        .distribution(history)?
        .prob(alphabet.index_of('i').unwrap());
    let p_mixed = mixed
        .distribution(history)?
        .prob(alphabet.index_of('i').unwrap());
    println!("P('i' | {history:?}): {p_plain:.3} alone, {p_mixed:.3} interpolated");
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
