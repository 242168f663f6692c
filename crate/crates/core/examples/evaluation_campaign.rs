// A clean and a 10%-noise run of the character 5-gram engine, with the
// reports written as CSV, text and JSON.
//
// `cargo run -p charpilot-core --example evaluation_campaign`

use std::error::Error;
use std::path::PathBuf;

use charpilot_core::corpus::{CorpusFormat, TranscriptOptions};
use charpilot_core::report::{render_table, ReportFormat};
use charpilot_core::{evaluate, CampaignConfig, NoiseSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let out = tempfile::tempdir()?;
    let cfg = CampaignConfig {
        engine: data.join("engines/char5.toml"),
        dataset: data.join("synthetic_phrases.txt"),
        format: CorpusFormat::PhraseLines,
        transcript: TranscriptOptions::default(),
        noise: Some(NoiseSpec::new(0.1, 7)?),
        repeats: 2,
        out: out.path().to_path_buf(),
        label: None,
        formats: vec![ReportFormat::Csv, ReportFormat::Table, ReportFormat::Json],
    };
    let ev = evaluate(&cfg)?;
    let noisy = ev.noisy.as_ref().ok_or("noisy run missing")?;
    print!(
        "{}",
        render_table(
            &[
                (&ev.clean.label, &ev.clean.overall),
                (&noisy.label, &noisy.overall)
            ],
            false
        )
    );
    let delta = ev.delta.as_ref().ok_or("delta missing")?;
    print!("{}", render_table(&[(&delta.label, &delta.overall)], true));
    println!("{} files written", ev.files.len());
    assert!(delta.overall.mrr_at(10).unwrap() < 0.0);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
