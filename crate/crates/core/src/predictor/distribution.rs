use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::text::Phrase;

/// Probability per alphabet symbol, or the explicit empty state when no
/// candidate carried any mass.
#[derive(Clone, Debug, PartialEq)]
pub struct CharDistribution {
    probs: Vec<f64>,
    empty: bool,
}

/// One entry of a ranking.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedChar {
    #[serde(rename = "char")]
    pub ch: char,
    pub prob: f64,
}

impl CharDistribution {
    pub fn empty(len: usize) -> Self {
        Self {
            probs: vec![0.0; len],
            empty: true,
        }
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            probs: vec![1.0 / len as f64; len],
            empty: false,
        }
    }

    /// Normalizes nonnegative mass; zero total gives the empty state.
    pub fn from_mass(mut mass: Vec<f64>) -> Self {
        debug_assert!(mass.iter().all(|m| *m >= 0.0 && m.is_finite()));
        let total: f64 = mass.iter().sum();
        if total <= 0.0 {
            return Self::empty(mass.len());
        }
        mass.iter_mut().for_each(|m| *m /= total);
        Self {
            probs: mass,
            empty: false,
        }
    }

    /// Character unigram with add-`k` smoothing over every alphabet symbol,
    /// boundaries between words included.
    pub fn unigram(phrases: &[Phrase], alphabet: &Alphabet, k: f64) -> Self {
        let mut counts = vec![k; alphabet.len()];
        for p in phrases {
            for c in p.text().chars() {
                if let Some(i) = alphabet.index_of(c) {
                    counts[i] += 1.0;
                }
            }
        }
        Self::from_mass(counts)
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Symbol indices by descending probability, ties in alphabet order.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.probs.len()).collect();
        idx.sort_by(|&a, &b| self.probs[b].total_cmp(&self.probs[a]).then(a.cmp(&b)));
        idx
    }

    pub fn ranked(&self, alphabet: &Alphabet) -> Vec<RankedChar> {
        self.order()
            .into_iter()
            .map(|i| RankedChar {
                ch: alphabet.char_at(i),
                prob: self.probs[i],
            })
            .collect()
    }

    /// 1-based rank of the symbol at `index`.
    pub fn rank_of(&self, index: usize) -> usize {
        let p = self.probs[index];
        1 + self
            .probs
            .iter()
            .enumerate()
            .filter(|&(j, &q)| q > p || (q == p && j < index))
            .count()
    }

    pub fn total_variation(&self, other: &CharDistribution) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}
