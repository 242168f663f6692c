//! The closed symbol set every prediction is ranked over.

use std::collections::HashMap;
use std::fmt;

use crate::error::ConfigError;

/// Ordered set of characters with a distinguished word separator.
///
/// The order matters: it is the tie-break order used by every ranking.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    chars: Vec<char>,
    boundary: char,
    index: HashMap<char, usize>,
}

impl Alphabet {
    /// Builds an alphabet from `chars`, which must be unique and contain `boundary`.
    pub fn new(chars: impl IntoIterator<Item = char>, boundary: char) -> Result<Self, ConfigError> {
        let chars: Vec<char> = chars.into_iter().collect();
        let mut index = HashMap::with_capacity(chars.len());
        for (i, &c) in chars.iter().enumerate() {
            if index.insert(c, i).is_some() {
                return Err(ConfigError::Alphabet(format!("duplicate character {c:?}")));
            }
        }
        if !index.contains_key(&boundary) {
            return Err(ConfigError::Alphabet(format!(
                "boundary character {boundary:?} is not part of the alphabet"
            )));
        }
        Ok(Self {
            chars,
            boundary,
            index,
        })
    }

    /// Parses an alphabet written as a plain string, e.g. `"abc "`.
    pub fn from_str_with_boundary(s: &str, boundary: char) -> Result<Self, ConfigError> {
        Self::new(s.chars(), boundary)
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn boundary(&self) -> char {
        self.boundary
    }

    pub fn boundary_index(&self) -> usize {
        self.index[&self.boundary]
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn char_at(&self, i: usize) -> char {
        self.chars[i]
    }

    pub fn contains(&self, c: char) -> bool {
        self.index.contains_key(&c)
    }

    /// True when every character of `s` belongs to the alphabet.
    pub fn covers(&self, s: &str) -> bool {
        s.chars().all(|c| self.contains(c))
    }

    /// Letters only, i.e. everything but the boundary.
    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        self.chars
            .iter()
            .copied()
            .filter(move |&c| c != self.boundary)
    }
}

impl Default for Alphabet {
    /// `a`..=`z` followed by space.
    fn default() -> Self {
        Self::new(('a'..='z').chain(std::iter::once(' ')), ' ')
            .expect("default alphabet is well formed")
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Alphabet")
            .field("chars", &self.chars.iter().collect::<String>())
            .field("boundary", &self.boundary)
            .finish()
    }
}
