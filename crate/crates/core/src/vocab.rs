//! Token inventories with explicit word-start marking.
//!
//! A token's `surface` never contains the boundary character. Word-initial
//! tokens (`starts_word`) stand for boundary + surface when they follow
//! other text, which is how `_butter` style subword units are represented.
//! At the very start of a text, subword vocabularies use non-initial tokens
//! (there is no preceding boundary); closed word vocabularies use words.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::VocabError;
use crate::text::Phrase;
use crate::trie::VocabTrie;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub surface: String,
    pub starts_word: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VocabKind {
    Character,
    ClosedWord,
    Subword,
}

impl VocabKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VocabKind::Character => "character",
            VocabKind::ClosedWord => "closed_word",
            VocabKind::Subword => "subword",
        }
    }
}

/// Constraint on a token's word-start flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WordStart {
    Required,
    Forbidden,
    Any,
}

impl WordStart {
    pub fn admits(self, starts_word: bool) -> bool {
        match self {
            WordStart::Required => starts_word,
            WordStart::Forbidden => !starts_word,
            WordStart::Any => true,
        }
    }
}

/// Typed history split into fully committed tokens and the trailing partial token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSplit {
    pub committed: Vec<TokenId>,
    /// Surface the next token must extend (without any boundary marker).
    pub partial: String,
    /// Flag the extending token must carry.
    pub word_start: WordStart,
}

impl PartialSplit {
    /// The partial as rendered text, i.e. with the boundary when word-initial.
    pub fn pending(&self, boundary: char) -> String {
        match self.word_start {
            WordStart::Required => {
                let mut s = String::with_capacity(self.partial.len() + 1);
                s.push(boundary);
                s.push_str(&self.partial);
                s
            }
            _ => self.partial.clone(),
        }
    }

    /// Interprets text left over after `committed` (as returned by an external
    /// tokenizer): a leading boundary marks a word-initial partial.
    pub fn from_pending(
        committed: Vec<TokenId>,
        pending: &str,
        history_empty: bool,
        boundary: char,
    ) -> Self {
        let (partial, word_start) = match pending.strip_prefix(boundary) {
            Some(rest) => (rest.to_string(), WordStart::Required),
            None if pending.is_empty() && !history_empty => (String::new(), WordStart::Any),
            None => (pending.to_string(), WordStart::Forbidden),
        };
        Self {
            committed,
            partial,
            word_start,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Vocabulary {
    kind: VocabKind,
    alphabet: Alphabet,
    tokens: Vec<Token>,
    by_surface: HashMap<(bool, String), TokenId>,
    trie: VocabTrie,
}

impl Vocabulary {
    /// Validates and indexes `tokens`, which must carry dense ids `0..n` in order.
    pub fn new(
        kind: VocabKind,
        tokens: Vec<Token>,
        alphabet: Alphabet,
    ) -> Result<Self, VocabError> {
        if tokens.is_empty() {
            return Err(VocabError::Invalid("vocabulary is empty".into()));
        }
        let b = alphabet.boundary();
        let mut by_surface = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if t.id.index() != i {
                return Err(VocabError::Invalid(format!(
                    "token ids must be dense; found {} at position {i}",
                    t.id
                )));
            }
            if t.surface.is_empty() {
                return Err(VocabError::Invalid(format!(
                    "token {} has an empty surface",
                    t.id
                )));
            }
            if let Some(c) = t.surface.chars().find(|&c| !alphabet.contains(c)) {
                return Err(VocabError::Invalid(format!(
                    "token {} surface {:?} contains {c:?}, which is outside the alphabet",
                    t.id, t.surface
                )));
            }
            match kind {
                VocabKind::Character => {
                    if t.surface.chars().count() != 1 || t.starts_word {
                        return Err(VocabError::Invalid(format!(
                            "character token {} must be a single non-initial character",
                            t.id
                        )));
                    }
                }
                VocabKind::ClosedWord | VocabKind::Subword => {
                    if t.surface.contains(b) {
                        return Err(VocabError::Invalid(format!(
                            "token {} surface {:?} contains the boundary character",
                            t.id, t.surface
                        )));
                    }
                    if kind == VocabKind::ClosedWord && !t.starts_word {
                        return Err(VocabError::Invalid(format!(
                            "closed word {:?} must start a word",
                            t.surface
                        )));
                    }
                }
            }
            if by_surface
                .insert((t.starts_word, t.surface.clone()), t.id)
                .is_some()
            {
                return Err(VocabError::Invalid(format!(
                    "duplicate token {:?}",
                    t.surface
                )));
            }
        }
        let trie = VocabTrie::build(&tokens);
        Ok(Self {
            kind,
            alphabet,
            tokens,
            by_surface,
            trie,
        })
    }

    /// One token per alphabet symbol, in alphabet order.
    pub fn characters(alphabet: &Alphabet) -> Self {
        let tokens = alphabet
            .chars()
            .iter()
            .enumerate()
            .map(|(i, c)| Token {
                id: TokenId(i as u32),
                surface: c.to_string(),
                starts_word: false,
            })
            .collect();
        Self::new(VocabKind::Character, tokens, alphabet.clone())
            .expect("alphabet symbols are valid tokens")
    }

    /// Closed vocabulary of whole words; duplicates collapse onto the first occurrence.
    pub fn closed_words<I, S>(words: I, alphabet: &Alphabet) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut tokens = Vec::new();
        for w in words {
            let w = w.as_ref();
            if seen.insert(w.to_string()) {
                tokens.push(Token {
                    id: TokenId(tokens.len() as u32),
                    surface: w.to_string(),
                    starts_word: true,
                });
            }
        }
        Self::new(VocabKind::ClosedWord, tokens, alphabet.clone())
    }

    /// Builds a subword vocabulary from `(surface, starts_word)` pairs in id order.
    pub fn subwords<I, S>(pieces: I, alphabet: &Alphabet) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        let tokens = pieces
            .into_iter()
            .enumerate()
            .map(|(i, (s, w))| Token {
                id: TokenId(i as u32),
                surface: s.into(),
                starts_word: w,
            })
            .collect();
        Self::new(VocabKind::Subword, tokens, alphabet.clone())
    }

    /// Derives a subword inventory from corpus statistics: every letter in both
    /// flavours, the `max_words` most frequent words, and the `max_pieces` most
    /// frequent word-initial and word-final fragments of 2 to 4 letters.
    /// Any text over the alphabet's letters is tokenizable with the result.
    pub fn subword_from_corpus(
        phrases: &[Phrase],
        alphabet: &Alphabet,
        max_words: usize,
        max_pieces: usize,
    ) -> Result<Self, VocabError> {
        let b = alphabet.boundary();
        let mut words: HashMap<&str, usize> = HashMap::new();
        let mut heads: HashMap<&str, usize> = HashMap::new();
        let mut tails: HashMap<&str, usize> = HashMap::new();
        for p in phrases {
            for w in p.text().split(b).filter(|w| !w.is_empty()) {
                *words.entry(w).or_default() += 1;
                let idx: Vec<usize> = w.char_indices().map(|(i, _)| i).chain([w.len()]).collect();
                let n = idx.len() - 1;
                for len in 2..=4.min(n.saturating_sub(1)) {
                    *heads.entry(&w[..idx[len]]).or_default() += 1;
                    *tails.entry(&w[idx[n - len]..]).or_default() += 1;
                }
            }
        }
        fn top<'a>(m: &HashMap<&'a str, usize>, n: usize, min_len: usize) -> Vec<&'a str> {
            let mut v: Vec<(&str, usize)> = m
                .iter()
                .filter(|(s, _)| s.chars().count() >= min_len)
                .map(|(s, c)| (*s, *c))
                .collect();
            v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            v.into_iter().take(n).map(|(s, _)| s).collect()
        }

        let mut pieces: Vec<(String, bool)> = Vec::new();
        let mut seen = HashSet::new();
        let mut add = |s: &str, w: bool, pieces: &mut Vec<(String, bool)>| {
            if seen.insert((s.to_string(), w)) {
                pieces.push((s.to_string(), w));
            }
        };
        for c in alphabet.letters() {
            add(&c.to_string(), true, &mut pieces);
            add(&c.to_string(), false, &mut pieces);
        }
        for w in top(&words, max_words, 2) {
            add(w, true, &mut pieces);
            add(w, false, &mut pieces);
        }
        for h in top(&heads, max_pieces, 2) {
            add(h, true, &mut pieces);
            add(h, false, &mut pieces);
        }
        for t in top(&tails, max_pieces, 2) {
            add(t, false, &mut pieces);
        }
        Self::subwords(pieces, alphabet)
    }

    /// Reads `token_id<TAB>surface<TAB>starts_word(0|1)` lines.
    pub fn load_tsv(path: &Path, kind: VocabKind, alphabet: &Alphabet) -> Result<Self, VocabError> {
        let text = std::fs::read_to_string(path).map_err(|source| VocabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_tsv(&text, kind, alphabet)
    }

    pub fn parse_tsv(text: &str, kind: VocabKind, alphabet: &Alphabet) -> Result<Self, VocabError> {
        let mut tokens = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.is_empty() {
                continue;
            }
            let malformed = |message: String| VocabError::Malformed {
                line: line_no,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(malformed(format!(
                    "expected 3 tab-separated columns, found {}",
                    cols.len()
                )));
            }
            let id: u32 = cols[0]
                .parse()
                .map_err(|_| malformed(format!("token id {:?} is not an integer", cols[0])))?;
            let starts_word = match cols[2] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(malformed(format!(
                        "starts_word must be 0 or 1, found {other:?}"
                    )))
                }
            };
            tokens.push(Token {
                id: TokenId(id),
                surface: cols[1].to_string(),
                starts_word,
            });
        }
        tokens.sort_by_key(|t| t.id);
        Self::new(kind, tokens, alphabet.clone())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                t.id,
                t.surface,
                u8::from(t.starts_word)
            ));
        }
        out
    }

    pub fn kind(&self) -> VocabKind {
        self.kind
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> &Token {
        &self.tokens[id.index()]
    }

    pub fn trie(&self) -> &VocabTrie {
        &self.trie
    }

    pub fn lookup(&self, surface: &str, starts_word: bool) -> Option<TokenId> {
        self.by_surface
            .get(&(starts_word, surface.to_string()))
            .copied()
    }

    /// Surface as it appears when the token follows other text.
    pub fn rendered(&self, id: TokenId) -> String {
        let t = self.token(id);
        if t.starts_word {
            let mut s = String::with_capacity(t.surface.len() + 1);
            s.push(self.alphabet.boundary());
            s.push_str(&t.surface);
            s
        } else {
            t.surface.clone()
        }
    }

    fn text_start(&self) -> bool {
        self.kind == VocabKind::ClosedWord
    }

    /// Deterministic left-to-right longest-match segmentation.
    ///
    /// A boundary is always absorbed by the word-initial token that follows
    /// it, so a trailing boundary is untokenizable.
    pub fn greedy_tokenize(&self, text: &str) -> Result<Vec<TokenId>, VocabError> {
        let chars: Vec<char> = text.chars().collect();
        let fail = |offset| VocabError::Untokenizable {
            text: text.to_string(),
            offset,
        };

        if self.kind == VocabKind::Character {
            return chars
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mut buf = [0u8; 4];
                    self.lookup(c.encode_utf8(&mut buf), false)
                        .ok_or_else(|| fail(i))
                })
                .collect();
        }

        let b = self.alphabet.boundary();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (starts_word, start) = if chars[i] == b {
                (true, i + 1)
            } else if i == 0 {
                (self.text_start(), 0)
            } else {
                (false, i)
            };
            let (id, len) = self
                .trie
                .longest_match(starts_word, &chars[start..])
                .ok_or_else(|| fail(i))?;
            out.push(id);
            i = start + len;
        }
        Ok(out)
    }

    /// Inverse of [`Vocabulary::greedy_tokenize`].
    pub fn detokenize(&self, ids: &[TokenId]) -> String {
        let mut out = String::new();
        for (k, &id) in ids.iter().enumerate() {
            if self.kind == VocabKind::Character || (k == 0 && self.text_start()) {
                out.push_str(&self.token(id).surface);
            } else {
                out.push_str(&self.rendered(id));
            }
        }
        out
    }

    /// Splits `history` into committed tokens and the partial last token.
    ///
    /// The final greedy token is the partial; when the history ends at a
    /// boundary the partial is empty and must be extended by a word-initial token.
    /// Word-level and subword vocabularies ignore leading and repeated boundaries.
    pub fn find_partial_suffix(&self, history: &str) -> Result<PartialSplit, VocabError> {
        let b = self.alphabet.boundary();
        let squeezed;
        let history = if self.kind != VocabKind::Character && has_loose_boundaries(history, b) {
            squeezed = squeeze_boundaries(history, b);
            squeezed.as_str()
        } else {
            history
        };
        if history.is_empty() {
            let word_start = if self.text_start() {
                WordStart::Required
            } else {
                WordStart::Forbidden
            };
            return Ok(PartialSplit {
                committed: Vec::new(),
                partial: String::new(),
                word_start,
            });
        }
        if let Some(head) = history.strip_suffix(b) {
            return Ok(PartialSplit {
                committed: self.greedy_tokenize(head)?,
                partial: String::new(),
                word_start: WordStart::Required,
            });
        }
        let mut committed = self.greedy_tokenize(history)?;
        let last = committed.pop().expect("nonempty history yields a token");
        let token = self.token(last);
        let at_start = committed.is_empty() && self.text_start();
        Ok(PartialSplit {
            committed,
            partial: token.surface.clone(),
            word_start: if token.starts_word && !at_start {
                WordStart::Required
            } else {
                WordStart::Forbidden
            },
        })
    }
}

fn has_loose_boundaries(s: &str, b: char) -> bool {
    s.starts_with(b)
        || s.chars()
            .zip(s.chars().skip(1))
            .any(|(x, y)| x == b && y == b)
}

/// Drops leading boundaries and collapses runs to one.
fn squeeze_boundaries(s: &str, b: char) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c != b || !(out.is_empty() || out.ends_with(b)) {
            out.push(c);
        }
    }
    out
}
