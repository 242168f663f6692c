//! Count-based n-gram models with add-k smoothing.
//!
//! Sequences are padded on the left with a start symbol, so short contexts
//! mean "start of phrase". A context that never occurred in training backs
//! off to its longest observed suffix.

use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::Alphabet;
use crate::backend::{
    truncate_context, BackendDescriptor, BackendKind, LanguageModel, TokenDistribution,
};
use crate::error::BackendError;
use crate::text::Phrase;
use crate::vocab::{TokenId, Vocabulary};

const START: u32 = u32::MAX;

#[derive(Clone, Debug, Default)]
struct ContextCounts {
    total: u64,
    next: HashMap<u32, u64>,
}

#[derive(Clone, Debug)]
pub struct NgramModel {
    descriptor: BackendDescriptor,
    order: usize,
    k: f64,
    counts: HashMap<Vec<u32>, ContextCounts>,
}

impl NgramModel {
    /// Trains on pre-tokenized sequences.
    pub fn train(
        vocab: Arc<Vocabulary>,
        sequences: &[Vec<TokenId>],
        order: usize,
        k: f64,
    ) -> Result<Self, BackendError> {
        if order == 0 {
            return Err(BackendError::Invalid(
                "n-gram order must be at least 1".into(),
            ));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(BackendError::Invalid(format!(
                "smoothing constant must be >= 0, got {k}"
            )));
        }
        if sequences.iter().all(Vec::is_empty) {
            return Err(BackendError::EmptyCorpus);
        }

        let hist = order - 1;
        let mut counts: HashMap<Vec<u32>, ContextCounts> = HashMap::new();
        for seq in sequences {
            let padded: Vec<u32> = std::iter::repeat_n(START, hist)
                .chain(seq.iter().map(|t| t.0))
                .collect();
            for (i, &target) in seq.iter().enumerate() {
                let end = i + hist;
                for len in 0..=hist {
                    let entry = counts.entry(padded[end - len..end].to_vec()).or_default();
                    entry.total += 1;
                    *entry.next.entry(target.0).or_default() += 1;
                }
            }
        }

        Ok(Self {
            descriptor: BackendDescriptor::new(vocab, hist, true),
            order,
            k,
            counts,
        })
    }

    /// Character model over the full alphabet.
    pub fn train_chars(
        phrases: &[Phrase],
        alphabet: &Alphabet,
        order: usize,
        k: f64,
    ) -> Result<Self, BackendError> {
        let vocab = Arc::new(Vocabulary::characters(alphabet));
        let sequences = tokenize_all(&vocab, phrases)?;
        Self::train(vocab, &sequences, order, k)
    }

    /// Word model over the closed vocabulary of words seen in `phrases`
    /// (first-occurrence order). `order = 1` is a word unigram.
    pub fn train_words(
        phrases: &[Phrase],
        alphabet: &Alphabet,
        order: usize,
        k: f64,
    ) -> Result<Self, BackendError> {
        let b = alphabet.boundary();
        let words = phrases
            .iter()
            .flat_map(|p| p.text().split(b))
            .filter(|w| !w.is_empty());
        let vocab =
            Vocabulary::closed_words(words, alphabet).map_err(|_| BackendError::EmptyCorpus)?;
        let vocab = Arc::new(vocab);
        let sequences = tokenize_all(&vocab, phrases)?;
        Self::train(vocab, &sequences, order, k)
    }

    /// Model over an arbitrary vocabulary, with phrases segmented greedily.
    pub fn train_tokens(
        phrases: &[Phrase],
        vocab: Arc<Vocabulary>,
        order: usize,
        k: f64,
    ) -> Result<Self, BackendError> {
        let sequences = tokenize_all(&vocab, phrases)?;
        Self::train(vocab, &sequences, order, k)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> f64 {
        self.k
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.descriptor.vocab
    }

    fn lookup(&self, context: &[TokenId]) -> &ContextCounts {
        let hist = self.order - 1;
        let ctx = truncate_context(context, hist);
        let key: Vec<u32> = std::iter::repeat_n(START, hist - ctx.len())
            .chain(ctx.iter().map(|t| t.0))
            .collect();
        (0..=hist)
            .rev()
            .find_map(|len| self.counts.get(&key[hist - len..]))
            .expect("the empty context is always observed")
    }

    /// Smoothed probability of `next` after `context`.
    pub fn prob(&self, context: &[TokenId], next: TokenId) -> f64 {
        let c = self.lookup(context);
        let v = self.descriptor.vocab.len() as f64;
        let hits = c.next.get(&next.0).copied().unwrap_or(0) as f64;
        (hits + self.k) / (c.total as f64 + self.k * v)
    }
}

fn tokenize_all(vocab: &Vocabulary, phrases: &[Phrase]) -> Result<Vec<Vec<TokenId>>, BackendError> {
    if phrases.is_empty() {
        return Err(BackendError::EmptyCorpus);
    }
    phrases
        .iter()
        .map(|p| vocab.greedy_tokenize(p.text()).map_err(BackendError::from))
        .collect()
}

impl LanguageModel for NgramModel {
    fn descriptor(&self) -> &BackendDescriptor {
        &self.descriptor
    }

    fn next_token_dist(&self, context: &[TokenId]) -> Result<TokenDistribution, BackendError> {
        let c = self.lookup(context);
        let v = self.descriptor.vocab.len();
        let denom = c.total as f64 + self.k * v as f64;
        let mut probs = vec![self.k / denom; v];
        for (&id, &n) in &c.next {
            probs[id as usize] = (n as f64 + self.k) / denom;
        }
        TokenDistribution::from_weights(probs)
    }
}

/// Trains the built-in backend matching `kind`. Subword backends need a
/// vocabulary; the others derive theirs from the alphabet or the corpus.
pub fn train_ngram(
    corpus: &[Phrase],
    kind: BackendKind,
    alphabet: &Alphabet,
    subword_vocab: Option<Arc<Vocabulary>>,
    order: usize,
    k: f64,
) -> Result<NgramModel, BackendError> {
    match kind {
        BackendKind::CharDirect => NgramModel::train_chars(corpus, alphabet, order, k),
        BackendKind::ClosedWord => NgramModel::train_words(corpus, alphabet, order, k),
        BackendKind::Subword => {
            let vocab = subword_vocab.ok_or_else(|| {
                BackendError::Invalid("a subword backend needs a vocabulary".into())
            })?;
            NgramModel::train_tokens(corpus, vocab, order, k)
        }
    }
}
