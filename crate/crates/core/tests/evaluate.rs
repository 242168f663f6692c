//! Configured end-to-end evaluation on the bundled synthetic data.

mod common;

use charpilot_core::config::CampaignConfig;
use charpilot_core::corpus::{load_corpus, CorpusFormat, TranscriptOptions};
use charpilot_core::report::ReportFormat;
use charpilot_core::{evaluate, EngineConfig, NoiseSpec};
use common::data_dir;

fn campaign(engine: &str, out: &std::path::Path, noise: Option<NoiseSpec>) -> CampaignConfig {
    CampaignConfig {
        engine: data_dir().join("engines").join(engine),
        dataset: data_dir().join("synthetic_phrases.txt"),
        format: CorpusFormat::PhraseLines,
        transcript: TranscriptOptions::default(),
        noise,
        repeats: 2,
        out: out.to_path_buf(),
        label: None,
        formats: vec![ReportFormat::Csv, ReportFormat::Table, ReportFormat::Json],
    }
}

#[test]
fn every_bundled_engine_evaluates_with_sane_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut mrr = Vec::new();
    for engine in ["unigram.toml", "char5.toml", "word3.toml", "subword.toml"] {
        let out = dir.path().join(engine);
        let ev = evaluate(&campaign(
            engine,
            &out,
            Some(NoiseSpec::new(0.1, 3).unwrap()),
        ))
        .unwrap();
        ev.clean.check_invariants().unwrap();
        ev.noisy.as_ref().unwrap().check_invariants().unwrap();
        assert!(out.join("summary.csv").exists());
        assert!(out.join("delta.csv").exists());
        assert!(out.join("noisy/summary.csv").exists());
        let header = std::fs::read_to_string(out.join("summary.csv")).unwrap();
        assert!(header.starts_with("model,MRR@10,Recall@10,MRR@5,Recall@5,MRR@3,Recall@3\n"));
        mrr.push(ev.clean.overall.mrr_at(10).unwrap());
    }
    // any trained model beats the unigram baseline on its own training data
    for m in &mrr[1..] {
        assert!(*m > mrr[0], "{mrr:?}");
    }
}

#[test]
fn campaign_file_resolves_relative_paths() {
    let cfg = CampaignConfig::load(&data_dir().join("campaign.toml")).unwrap();
    assert!(cfg.engine.ends_with("engines/char5.toml"));
    assert_eq!(cfg.noise, Some(NoiseSpec { rate: 0.1, seed: 7 }));
    assert_eq!(cfg.repeats, 3);
    EngineConfig::load(&cfg.engine).unwrap();
}

#[test]
fn transcript_fixture_loads() {
    let p = load_corpus(
        &data_dir().join("switchboard_sample.tsv"),
        CorpusFormat::SwitchboardTranscript,
        &TranscriptOptions::default(),
    )
    .unwrap();
    let texts: Vec<&str> = p.iter().map(|p| p.text()).collect();
    assert_eq!(
        texts,
        [
            "hi how are you doing",
            "i am doing fine thanks",
            "so what do you think about the weather",
            "it is raining all week pretty much",
            "do you like to go camping",
            "we went camping last summer",
            "oh where did you go",
            "up north near the lake",
            "so you have got kids",
            "two of them both in school",
        ]
    );
}
