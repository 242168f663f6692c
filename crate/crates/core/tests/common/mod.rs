#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use charpilot_core::backend::NgramModel;
use charpilot_core::text::Phrase;
use charpilot_core::{Alphabet, Vocabulary};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn word(rng: &mut impl Rng, letters: &[char], min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    (0..n)
        .map(|_| letters[rng.random_range(0..letters.len())])
        .collect()
}

pub fn phrase_text(rng: &mut impl Rng, letters: &[char], words: usize) -> String {
    (0..words)
        .map(|_| word(rng, letters, 1, 5))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn phrases(texts: &[String]) -> Vec<Phrase> {
    let a = Alphabet::default();
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| Phrase::new(t.clone(), format!("syn:{i}"), &a).unwrap())
        .collect()
}

pub const SMALL: [char; 5] = ['a', 'b', 'c', 'd', 'e'];

/// Random subword vocabulary over `SMALL`: every letter in both flavors plus
/// `extra` multi-letter pieces, at most 30 tokens in all.
pub fn small_subword_vocab(rng: &mut impl Rng, extra: usize) -> Arc<Vocabulary> {
    let mut pieces: Vec<(String, bool)> = Vec::new();
    for c in SMALL {
        pieces.push((c.to_string(), true));
        pieces.push((c.to_string(), false));
    }
    while pieces.len() < 10 + extra {
        let p = (word(rng, &SMALL, 2, 3), rng.random_bool(0.5));
        if !pieces.contains(&p) {
            pieces.push(p);
        }
    }
    assert!(pieces.len() <= 30);
    Arc::new(Vocabulary::subwords(pieces, &Alphabet::default()).unwrap())
}

/// Token trigram trained on random phrases over `SMALL`.
pub fn small_subword_model(seed: u64, extra: usize) -> NgramModel {
    let mut r = rng(seed);
    let vocab = small_subword_vocab(&mut r, extra);
    let texts: Vec<String> = (0..40)
        .map(|_| {
            let n = r.random_range(1..=4);
            phrase_text(&mut r, &SMALL, n)
        })
        .collect();
    NgramModel::train_tokens(&phrases(&texts), vocab, 3, 0.05).unwrap()
}

/// Random history over `SMALL`, sometimes ending in a boundary.
pub fn small_history(rng: &mut impl Rng) -> String {
    let n = rng.random_range(0..=3);
    let mut h = phrase_text(rng, &SMALL, n);
    if n > 0 && rng.random_bool(0.3) {
        h.push(' ');
    }
    h
}
