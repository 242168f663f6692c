//! Noisy-history simulation by random letter substitution.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const LETTERS: [char; 26] = [
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r', 's',
    't', 'u', 'v', 'w', 'x', 'y', 'z',
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Per-letter substitution probability.
    pub rate: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(rate: f64, seed: u64) -> Result<Self, String> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(format!("noise rate must lie in [0, 1], got {rate}"));
        }
        Ok(Self { rate, seed })
    }

    /// Independent generator for one (item, repeat) pair; the stream does
    /// not depend on the order in which items are processed.
    pub fn rng_for(&self, item: u64, repeat: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(item.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ repeat);
        rng
    }
}

/// Replaces each `a`-`z` letter of `history`, with probability `rate`, by a
/// uniformly drawn different letter. Everything else (word boundaries
/// included) is left in place.
pub fn corrupt_with<R: RngCore + ?Sized>(history: &str, rate: f64, rng: &mut R) -> String {
    history
        .chars()
        .map(|c| match LETTERS.iter().position(|&l| l == c) {
            Some(orig) if rate > 0.0 && rng.random_bool(rate) => {
                // draw from the 25 other letters
                let mut j = rng.random_range(0..25);
                if j >= orig {
                    j += 1;
                }
                LETTERS[j]
            }
            _ => c,
        })
        .collect()
}

/// Corrupts with a generator seeded from `spec.seed` alone.
pub fn corrupt(history: &str, spec: &NoiseSpec) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    corrupt_with(history, spec.rate, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rate_zero_is_identity() {
        let s = "the quick brown fox";
        assert_eq!(corrupt(s, &NoiseSpec::new(0.0, 3).unwrap()), s);
    }

    #[test]
    fn rate_one_changes_every_letter() {
        let s = "the quick brown fox jumps over the lazy dog";
        let out = corrupt(s, &NoiseSpec::new(1.0, 11).unwrap());
        for (a, b) in s.chars().zip(out.chars()) {
            if a == ' ' {
                assert_eq!(b, ' ');
            } else {
                assert_ne!(a, b);
                assert!(b.is_ascii_lowercase());
            }
        }
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(NoiseSpec::new(-0.1, 0).is_err());
        assert!(NoiseSpec::new(1.1, 0).is_err());
    }

    #[test]
    fn per_item_streams_differ() {
        let spec = NoiseSpec::new(0.5, 9).unwrap();
        let s = "abcdefghijklmnopqrstuvwxyz";
        let a = corrupt_with(s, spec.rate, &mut spec.rng_for(0, 0));
        let b = corrupt_with(s, spec.rate, &mut spec.rng_for(1, 0));
        let c = corrupt_with(s, spec.rate, &mut spec.rng_for(0, 1));
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, corrupt_with(s, spec.rate, &mut spec.rng_for(0, 0)));
    }

    proptest! {
        #[test]
        fn preserves_length_spaces_and_alphabet(
            s in "[a-z ]{0,60}", rate in 0.0f64..=1.0, seed in any::<u64>()
        ) {
            let spec = NoiseSpec::new(rate, seed).unwrap();
            let out = corrupt(&s, &spec);
            prop_assert_eq!(out.chars().count(), s.chars().count());
            for (a, b) in s.chars().zip(out.chars()) {
                prop_assert_eq!(a == ' ', b == ' ');
                prop_assert!(b == ' ' || b.is_ascii_lowercase());
            }
            prop_assert_eq!(corrupt(&s, &spec), out);
        }
    }
}
