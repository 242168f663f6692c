//! Text normalization and evaluation-instance generation.
//!
//! Everything downstream assumes text over the [`Alphabet`]: lowercase
//! words separated by single boundary characters, no punctuation.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{ConfigError, CorpusError};

const DEFAULT_CONTRACTIONS: &str = include_str!("../data/contractions.tsv");
const DEFAULT_INTERJECTIONS: [&str; 3] = ["uh-huh", "yeah", "uh"];
const PLACEHOLDER_PREFIX: &str = "MUMBLE";

/// Which corpus-specific cleanup rules apply on top of the common ones.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Messages: punctuation removed, contractions expanded.
    #[default]
    Als,
    /// Conversational transcripts: additionally drops interjections and
    /// `MUMBLE`-style placeholders.
    Switchboard,
}

/// Contraction expansions keyed by lowercase contraction (ASCII apostrophe).
#[derive(Clone, Debug, Default)]
pub struct ContractionTable {
    entries: HashMap<String, String>,
}

impl ContractionTable {
    /// The built-in table shipped in `data/contractions.tsv`.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CONTRACTIONS).expect("built-in contraction table parses")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|message| ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Two-column TSV; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(k), Some(v), None) if !k.trim().is_empty() => {
                    entries.insert(
                        canonical_apostrophes(&k.trim().to_lowercase()),
                        v.trim().to_lowercase(),
                    );
                }
                _ => {
                    return Err(format!(
                        "line {}: expected two tab-separated columns",
                        n + 1
                    ))
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.entries.get(word).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Configurable normalizer. [`normalize`] uses the default instance.
#[derive(Clone, Debug)]
pub struct Normalizer {
    alphabet: Alphabet,
    contractions: ContractionTable,
    interjections: HashSet<String>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Self::new(Alphabet::default(), ContractionTable::builtin())
    }
}

impl Normalizer {
    pub fn new(alphabet: Alphabet, contractions: ContractionTable) -> Self {
        Self {
            alphabet,
            contractions,
            interjections: DEFAULT_INTERJECTIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    /// Adds words dropped under [`Profile::Switchboard`].
    pub fn with_interjections<I, S>(mut self, extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.interjections
            .extend(extra.into_iter().map(|s| s.into().to_lowercase()));
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn normalize(&self, raw: &str, profile: Profile) -> String {
        let drop_fillers = profile == Profile::Switchboard;
        let mut words: Vec<String> = Vec::new();

        for token in raw.split_whitespace() {
            let core = token.trim_matches(|c: char| !is_word_char(c));
            if drop_fillers && (is_placeholder(core) || self.is_interjection(core)) {
                continue;
            }
            let lowered = canonical_apostrophes(&core.to_lowercase());
            let expanded = self
                .contractions
                .get(&lowered)
                .or_else(|| self.contractions.get(lowered.trim_matches('\'')))
                .unwrap_or(&lowered);
            self.push_mapped(expanded, &mut words);
        }

        // Hyphen splitting can expose fillers ("uh-uh" -> "uh uh").
        if drop_fillers {
            words.retain(|w| !self.interjections.contains(w));
        }
        let sep = self.alphabet.boundary().to_string();
        words.join(&sep)
    }

    fn is_interjection(&self, core: &str) -> bool {
        self.interjections
            .contains(&canonical_apostrophes(&core.to_lowercase()))
    }

    fn push_mapped(&self, text: &str, words: &mut Vec<String>) {
        let boundary = self.alphabet.boundary();
        let mut current = String::new();
        for c in text.chars().flat_map(char::to_lowercase) {
            if c != boundary && self.alphabet.contains(c) {
                current.push(c);
            } else if (c == boundary || c.is_whitespace() || is_separator_punct(c))
                && !current.is_empty()
            {
                words.push(std::mem::take(&mut current));
            }
            // anything else (apostrophes, digits, punctuation) is dropped
        }
        if !current.is_empty() {
            words.push(current);
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '-')
}

fn is_separator_punct(c: char) -> bool {
    matches!(c, '-' | '\u{2013}' | '\u{2014}' | '_' | '/')
}

fn is_placeholder(core: &str) -> bool {
    core.trim_matches(|c: char| !c.is_alphanumeric())
        .starts_with(PLACEHOLDER_PREFIX)
}

fn canonical_apostrophes(s: &str) -> String {
    s.replace(['\u{2019}', '\u{2018}'], "'")
}

pub(crate) fn default_normalizer() -> &'static Normalizer {
    static DEFAULT: OnceLock<Normalizer> = OnceLock::new();
    DEFAULT.get_or_init(Normalizer::default)
}

/// Normalizes with the default alphabet and the built-in contraction table.
///
/// ```
/// use charpilot_core::text::{normalize, Profile};
/// assert_eq!(normalize("I don't know.", Profile::Als), "i do not know");
/// ```
pub fn normalize(raw: &str, profile: Profile) -> String {
    default_normalizer().normalize(raw, profile)
}

/// A normalized phrase: words over the alphabet separated by single boundaries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    text: String,
    source_id: String,
}

impl Phrase {
    /// Wraps already-normalized text, checking the phrase invariants.
    pub fn new(
        text: impl Into<String>,
        source_id: impl Into<String>,
        alphabet: &Alphabet,
    ) -> Result<Self, CorpusError> {
        let text = text.into();
        let b = alphabet.boundary();
        let doubled = text
            .chars()
            .zip(text.chars().skip(1))
            .any(|(x, y)| x == b && y == b);
        if text.starts_with(b) || text.ends_with(b) || doubled || !alphabet.covers(&text) {
            return Err(CorpusError::Malformed {
                path: Default::default(),
                line: 0,
                message: format!("{text:?} is not a normalized phrase"),
            });
        }
        Ok(Self {
            text,
            source_id: source_id.into(),
        })
    }

    /// Normalizes `raw` and wraps it. Returns `None` if nothing survives.
    pub fn from_raw(raw: &str, profile: Profile, source_id: impl Into<String>) -> Option<Self> {
        Self::from_raw_with(default_normalizer(), raw, profile, source_id)
    }

    pub fn from_raw_with(
        normalizer: &Normalizer,
        raw: &str,
        profile: Profile,
        source_id: impl Into<String>,
    ) -> Option<Self> {
        let text = normalizer.normalize(raw, profile);
        (!text.is_empty()).then(|| Self {
            text,
            source_id: source_id.into(),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }
}

/// One evaluation trial: predict `target` given `history`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionInstance {
    pub history: String,
    pub target: char,
    /// 0 for the first character of the target word.
    pub position_in_word: usize,
    /// Complete words preceding the target word.
    pub context_words: usize,
}

/// One instance per character of the phrase's last word.
///
/// ```
/// use charpilot_core::{Alphabet, text::{make_instances, Phrase}};
/// let alphabet = Alphabet::default();
/// let phrase = Phrase::new("go home", "p1", &alphabet).unwrap();
/// let inst = make_instances(&phrase, &alphabet).unwrap();
/// assert_eq!(inst.len(), 4);
/// assert_eq!(inst[1].history, "go h");
/// assert_eq!(inst[1].target, 'o');
/// ```
pub fn make_instances(
    phrase: &Phrase,
    alphabet: &Alphabet,
) -> Result<Vec<PredictionInstance>, CorpusError> {
    let b = alphabet.boundary();
    let text = phrase.text();
    let (head, last) = match text.rfind(b) {
        Some(i) => (&text[..i + b.len_utf8()], &text[i + b.len_utf8()..]),
        None => ("", text),
    };
    if last.is_empty() {
        return Err(CorpusError::NoTargetWord(text.to_string()));
    }
    let context_words = head.split(b).filter(|w| !w.is_empty()).count();

    let mut history = head.to_string();
    let mut out = Vec::with_capacity(last.len());
    for (position_in_word, target) in last.chars().enumerate() {
        out.push(PredictionInstance {
            history: history.clone(),
            target,
            position_in_word,
            context_words,
        });
        history.push(target);
    }
    Ok(out)
}

/// Instances for every phrase of a corpus, in corpus order.
pub fn corpus_instances(
    phrases: &[Phrase],
    alphabet: &Alphabet,
) -> Result<Vec<PredictionInstance>, CorpusError> {
    let mut out = Vec::new();
    for p in phrases {
        out.extend(make_instances(p, alphabet)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn expands_contractions_and_strips_punctuation() {
        assert_eq!(normalize("I don't know.", Profile::Als), "i do not know");
        assert_eq!(normalize("hello", Profile::Als), "hello");
        assert_eq!(
            normalize("It’s OK, I'm fine!", Profile::Als),
            "it is ok i am fine"
        );
        assert_eq!(normalize("  spaced   out  ", Profile::Als), "spaced out");
    }

    #[test]
    fn possessive_apostrophe_is_deleted() {
        assert_eq!(normalize("John's car", Profile::Als), "johns car");
    }

    #[test]
    fn hyphens_split_and_digits_drop() {
        assert_eq!(
            normalize("well-known 42 items", Profile::Als),
            "well known items"
        );
        assert_eq!(normalize("3pm", Profile::Als), "pm");
    }

    #[test]
    fn switchboard_drops_fillers_and_placeholders() {
        assert_eq!(
            normalize("uh-huh  yeah MUMBLEx okay", Profile::Switchboard),
            "okay"
        );
        assert_eq!(
            normalize("[MUMBLEx] so, uh, yeah. uh-uh right", Profile::Switchboard),
            "so right"
        );
        // the als profile keeps them
        assert_eq!(normalize("yeah okay", Profile::Als), "yeah okay");
    }

    #[test]
    fn interjection_list_is_extensible() {
        let n = Normalizer::default().with_interjections(["um", "Hmm"]);
        assert_eq!(
            n.normalize("um well hmm ok", Profile::Switchboard),
            "well ok"
        );
    }

    #[test]
    fn contraction_table_parses_and_rejects_garbage() {
        let t = ContractionTable::builtin();
        assert!(t.len() >= 40);
        assert_eq!(t.get("won't"), Some("will not"));
        assert!(ContractionTable::parse("a\tb\tc").is_err());
    }

    #[test]
    fn make_instances_two_words() {
        let a = Alphabet::default();
        let p = Phrase::new("go home", "x", &a).unwrap();
        let got = make_instances(&p, &a).unwrap();
        let want = [
            ("go ", 'h', 0),
            ("go h", 'o', 1),
            ("go ho", 'm', 2),
            ("go hom", 'e', 3),
        ];
        assert_eq!(got.len(), 4);
        for (inst, (h, t, pos)) in got.iter().zip(want) {
            assert_eq!(inst.history, h);
            assert_eq!(inst.target, t);
            assert_eq!(inst.position_in_word, pos);
            assert_eq!(inst.context_words, 1);
        }
    }

    #[test]
    fn make_instances_single_word() {
        let a = Alphabet::default();
        let p = Phrase::new("hi", "x", &a).unwrap();
        let got = make_instances(&p, &a).unwrap();
        assert_eq!(got[0].history, "");
        assert_eq!(got[0].target, 'h');
        assert_eq!(got[1].history, "h");
        assert_eq!(got[1].context_words, 0);
    }

    #[test]
    fn phrase_invariants_enforced() {
        let a = Alphabet::default();
        assert!(Phrase::new("", "x", &a).is_ok());
        assert!(Phrase::new(" lead", "x", &a).is_err());
        assert!(Phrase::new("two  spaces", "x", &a).is_err());
        assert!(Phrase::new("Caps", "x", &a).is_err());
        let empty = Phrase::new("", "x", &a).unwrap();
        assert!(matches!(
            make_instances(&empty, &a),
            Err(CorpusError::NoTargetWord(_))
        ));
        assert!(Phrase::from_raw("?!", Profile::Als, "x").is_none());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(raw in "[a-zA-Z0-9 '’.,!?\\-]{0,40}", sw in any::<bool>()) {
            let profile = if sw { Profile::Switchboard } else { Profile::Als };
            let once = normalize(&raw, profile);
            prop_assert_eq!(normalize(&once, profile), once.clone());
            prop_assert!(Alphabet::default().covers(&once));
            prop_assert!(!once.contains("  ") && !once.starts_with(' ') && !once.ends_with(' '));
        }

        #[test]
        fn instances_reconstruct_phrase(words in prop::collection::vec("[a-z]{1,8}", 1..6)) {
            let a = Alphabet::default();
            let text = words.join(" ");
            let p = Phrase::new(text.clone(), "x", &a).unwrap();
            let inst = make_instances(&p, &a).unwrap();
            prop_assert_eq!(inst.len(), words.last().unwrap().len());
            for i in &inst {
                let mut s = i.history.clone();
                s.push(i.target);
                prop_assert!(text.starts_with(&s));
                prop_assert_eq!(i.context_words, words.len() - 1);
            }
        }
    }
}
