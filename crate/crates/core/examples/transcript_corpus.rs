// Loading a conversational transcript: turns are normalized, interjections
// dropped, and every phrase yields one prediction per last-word character.
//
// `cargo run -p charpilot-core --example transcript_corpus`

use std::error::Error;
use std::path::PathBuf;

use charpilot_core::corpus::{load_corpus, CorpusFormat, TranscriptOptions};
use charpilot_core::text::corpus_instances;
use charpilot_core::{normalize, Alphabet, Profile};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let raw = "Uh, it's MUMBLEx RAINING all-week, yeah?";
    println!("{raw:?}\n -> {:?}", normalize(raw, Profile::Switchboard));

    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/switchboard_sample.tsv");
    let phrases = load_corpus(
        &path,
        CorpusFormat::SwitchboardTranscript,
        &TranscriptOptions::default(),
    )?;
    for p in phrases.iter().take(4) {
        println!("[{}] {}", p.source_id(), p.text());
    }
    let instances = corpus_instances(&phrases, &Alphabet::default())?;
    let first = &instances[0];
    println!(
        "{} phrases, {} instances; first: {:?} -> {:?}",
        phrases.len(),
        instances.len(),
        first.history,
        first.target
    );
    assert!(phrases
        .iter()
        .any(|p| p.text() == "it is raining all week pretty much"));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
