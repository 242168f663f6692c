//! Corpus loaders: one-phrase-per-line files and tab-separated dialogue transcripts.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CorpusError;
use crate::text::{default_normalizer, Normalizer, Phrase, Profile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    /// UTF-8 text, one phrase per line.
    PhraseLines,
    /// `conversation_id<TAB>turn_index<TAB>speaker<TAB>text` per line.
    SwitchboardTranscript,
}

/// Loader knobs for transcript corpora.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TranscriptOptions {
    /// Turns kept per conversation, counted in turn-index order.
    pub max_turns: usize,
    /// Conversations sampled; all are kept when fewer exist.
    pub sample_conversations: usize,
    pub seed: u64,
}

impl Default for TranscriptOptions {
    fn default() -> Self {
        Self {
            max_turns: 4,
            sample_conversations: 500,
            seed: 0,
        }
    }
}

pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    options: &TranscriptOptions,
) -> Result<Vec<Phrase>, CorpusError> {
    load_corpus_with(default_normalizer(), path, format, options)
}

pub fn load_corpus_with(
    normalizer: &Normalizer,
    path: &Path,
    format: CorpusFormat,
    options: &TranscriptOptions,
) -> Result<Vec<Phrase>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        CorpusFormat::PhraseLines => Ok(parse_phrase_lines_with(
            normalizer,
            &text,
            &path.display().to_string(),
        )),
        CorpusFormat::SwitchboardTranscript => parse_transcript_with(normalizer, &text, options)
            .map_err(|(line, message)| CorpusError::Malformed {
                path: path.to_path_buf(),
                line,
                message,
            }),
    }
}

/// Lines that normalize to nothing are skipped.
pub fn parse_phrase_lines(text: &str, source: &str) -> Vec<Phrase> {
    parse_phrase_lines_with(default_normalizer(), text, source)
}

pub fn parse_phrase_lines_with(normalizer: &Normalizer, text: &str, source: &str) -> Vec<Phrase> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .filter_map(|(i, l)| {
            Phrase::from_raw_with(normalizer, l, Profile::Als, format!("{source}:{}", i + 1))
        })
        .collect()
}

struct Turn {
    index: i64,
    text: String,
}

/// Errors carry the 1-based line number.
pub fn parse_transcript(
    text: &str,
    options: &TranscriptOptions,
) -> Result<Vec<Phrase>, (usize, String)> {
    parse_transcript_with(default_normalizer(), text, options)
}

pub fn parse_transcript_with(
    normalizer: &Normalizer,
    text: &str,
    options: &TranscriptOptions,
) -> Result<Vec<Phrase>, (usize, String)> {
    let mut order: Vec<String> = Vec::new();
    let mut conversations: HashMap<String, Vec<Turn>> = HashMap::new();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err((
                line_no,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let conv = fields[0].trim();
        if conv.is_empty() {
            return Err((line_no, "empty conversation id".into()));
        }
        let index: i64 = fields[1].trim().parse().map_err(|_| {
            (
                line_no,
                format!("turn index {:?} is not an integer", fields[1]),
            )
        })?;
        let turns = conversations.entry(conv.to_string()).or_insert_with(|| {
            order.push(conv.to_string());
            Vec::new()
        });
        turns.push(Turn {
            index,
            text: fields[3].to_string(),
        });
    }

    let mut chosen = order.clone();
    if chosen.len() > options.sample_conversations {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        chosen.shuffle(&mut rng);
        chosen.truncate(options.sample_conversations);
        // report in file order
        let rank: HashMap<&String, usize> = order.iter().enumerate().map(|(i, c)| (c, i)).collect();
        chosen.sort_by_key(|c| rank[c]);
    }

    let mut phrases = Vec::new();
    for conv in &chosen {
        let turns = conversations.get_mut(conv).expect("conversation recorded");
        turns.sort_by_key(|t| t.index);
        for turn in turns.iter().take(options.max_turns) {
            if let Some(p) = Phrase::from_raw_with(
                normalizer,
                &turn.text,
                Profile::Switchboard,
                format!("{conv}:{}", turn.index),
            ) {
                phrases.push(p);
            }
        }
    }
    Ok(phrases)
}
