// A subword n-gram served over the model-server protocol, and an engine
// that predicts through it exactly as it would in process.
//
// `cargo run -p charpilot --example model_server`

use std::error::Error;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use charpilot_core::backend::{LanguageModel, NgramModel, RemoteBackend};
use charpilot_core::corpus::{load_corpus, CorpusFormat, TranscriptOptions};
use charpilot_core::{Alphabet, Engine, Vocabulary};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::default();
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let phrases = load_corpus(
        &data.join("synthetic_phrases.txt"),
        CorpusFormat::PhraseLines,
        &TranscriptOptions::default(),
    )?;
    let vocab = Arc::new(Vocabulary::subword_from_corpus(
        &phrases, &alphabet, 300, 100,
    )?);
    let model: Arc<dyn LanguageModel> =
        Arc::new(NgramModel::train_tokens(&phrases, vocab, 3, 0.01)?);

    let rt = tokio::runtime::Runtime::new()?;
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let addr = listener.local_addr()?;
    let app = charpilot::backend_server::router(model.clone());
    rt.spawn(async move { axum::serve(listener, app).await });
    println!("model server on http://{addr}");

    let remote = RemoteBackend::connect(
        &format!("http://{addr}"),
        None,
        &alphabet,
        Duration::from_secs(5),
    )?;
    println!(
        "remote vocabulary: {} tokens",
        remote.descriptor().vocab.len()
    );
    let remote = Engine::new(Arc::new(remote), alphabet.clone());
    let local = Engine::new(model, alphabet);
    for history in ["i want some wa", "please call my "] {
        let r = remote.distribution(history)?;
        let l = local.distribution(history)?;
        println!(
            "{history:?}: top {:?}, TV to local {:.1e}",
            remote.predict(history)?[0].ch,
            r.total_variation(&l)
        );
        assert!(r.total_variation(&l) < 1e-12);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
