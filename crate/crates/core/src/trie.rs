//! Character trie over token surfaces, split by the word-start flag.

use std::collections::HashMap;

use crate::vocab::{Token, TokenId, WordStart};

#[derive(Clone, Debug, Default)]
struct Node {
    children: HashMap<char, usize>,
    /// Tokens whose surface passes through (or ends at) this node, sorted.
    through: Vec<TokenId>,
    /// Tokens whose surface ends exactly here.
    terminal: Vec<TokenId>,
}

/// Prefix index over a token inventory. Immutable once built.
#[derive(Clone, Debug)]
pub struct VocabTrie {
    nodes: Vec<Node>,
    /// Roots for non-word-initial and word-initial tokens.
    roots: [usize; 2],
}

impl VocabTrie {
    pub fn build<'a>(tokens: impl IntoIterator<Item = &'a Token>) -> Self {
        let mut trie = Self {
            nodes: vec![Node::default(), Node::default()],
            roots: [0, 1],
        };
        for t in tokens {
            trie.insert(t);
        }
        // sorted lists make results independent of insertion order
        for n in &mut trie.nodes {
            n.through.sort_unstable();
            n.terminal.sort_unstable();
        }
        trie
    }

    fn insert(&mut self, token: &Token) {
        let mut cur = self.roots[usize::from(token.starts_word)];
        self.nodes[cur].through.push(token.id);
        for c in token.surface.chars() {
            let next = match self.nodes[cur].children.get(&c) {
                Some(&n) => n,
                None => {
                    self.nodes.push(Node::default());
                    let n = self.nodes.len() - 1;
                    self.nodes[cur].children.insert(c, n);
                    n
                }
            };
            cur = next;
            self.nodes[cur].through.push(token.id);
        }
        self.nodes[cur].terminal.push(token.id);
    }

    fn walk(&self, root: usize, prefix: &str) -> Option<&Node> {
        let mut cur = root;
        for c in prefix.chars() {
            cur = *self.nodes[cur].children.get(&c)?;
        }
        Some(&self.nodes[cur])
    }

    fn through(&self, starts_word: bool, prefix: &str) -> &[TokenId] {
        self.walk(self.roots[usize::from(starts_word)], prefix)
            .map(|n| n.through.as_slice())
            .unwrap_or(&[])
    }

    /// Tokens whose surface starts with `prefix`. With `require_word_start`
    /// only word-initial tokens qualify; otherwise the flag is unconstrained.
    pub fn tokens_with_prefix(&self, prefix: &str, require_word_start: bool) -> Vec<TokenId> {
        let ws = if require_word_start {
            WordStart::Required
        } else {
            WordStart::Any
        };
        self.tokens_matching(prefix, ws)
    }

    /// Sorted ids of tokens whose surface starts with `prefix` and whose
    /// word-start flag satisfies `word_start`.
    pub fn tokens_matching(&self, prefix: &str, word_start: WordStart) -> Vec<TokenId> {
        match word_start {
            WordStart::Required => self.through(true, prefix).to_vec(),
            WordStart::Forbidden => self.through(false, prefix).to_vec(),
            WordStart::Any => {
                let (a, b) = (self.through(false, prefix), self.through(true, prefix));
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    if a[i] < b[j] {
                        out.push(a[i]);
                        i += 1;
                    } else {
                        out.push(b[j]);
                        j += 1;
                    }
                }
                out.extend_from_slice(&a[i..]);
                out.extend_from_slice(&b[j..]);
                out
            }
        }
    }

    /// Longest token of the given flag whose surface is a prefix of `text`.
    /// Returns the token and its length in characters.
    pub fn longest_match(&self, starts_word: bool, text: &[char]) -> Option<(TokenId, usize)> {
        let mut cur = self.roots[usize::from(starts_word)];
        let mut best = None;
        for (i, c) in text.iter().enumerate() {
            match self.nodes[cur].children.get(c) {
                Some(&n) => cur = n,
                None => break,
            }
            if let Some(&id) = self.nodes[cur].terminal.first() {
                best = Some((id, i + 1));
            }
        }
        best
    }
}

/// The character right after `prefix` in `surface`, or `None` on an exact match.
///
/// # Panics
///
/// If `prefix` is not a prefix of `surface`.
pub fn char_after_prefix(surface: &str, prefix: &str) -> Option<char> {
    let rest = surface
        .strip_prefix(prefix)
        .unwrap_or_else(|| panic!("{prefix:?} is not a prefix of {surface:?}"));
    rest.chars().next()
}
