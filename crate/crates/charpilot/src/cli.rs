//! `charpilot` command line.

use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use charpilot_core::backend::{train_ngram, BackendKind};
use charpilot_core::corpus::{load_corpus, CorpusFormat, TranscriptOptions};
use charpilot_core::report::{render_table, ReportFormat};
use charpilot_core::{
    corrupt, evaluate, Alphabet, CampaignConfig, EngineConfig, NoiseSpec, RankedChar, VocabKind,
    Vocabulary,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::service::{self, ServiceConfig};
use crate::{backend_server, Error};

#[derive(Debug, Parser)]
#[command(
    name = "charpilot",
    version,
    about = "Next-character prediction for text entry"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the next character after some text.
    Predict(PredictArgs),
    /// Score an engine on a dataset (MRR@k / Recall@k reports).
    Evaluate(EvaluateArgs),
    /// Apply random letter substitutions to text.
    Corrupt(CorruptArgs),
    /// Run the HTTP prediction service.
    Serve(ServeArgs),
    /// Model-server utilities.
    #[command(subcommand)]
    Backend(BackendCommand),
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Engine configuration (TOML or JSON).
    #[arg(long, alias = "engine")]
    pub config: PathBuf,
    #[arg(long)]
    pub text: String,
    /// Print only the first K lines.
    #[arg(long)]
    pub top_k: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    PhraseLines,
    SwitchboardTranscript,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::PhraseLines => CorpusFormat::PhraseLines,
            FormatArg::SwitchboardTranscript => CorpusFormat::SwitchboardTranscript,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Campaign file; the flags below override its fields.
    #[arg(long)]
    pub campaign: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub engine: Option<PathBuf>,
    /// Per-letter substitution rate of the noisy run.
    #[arg(long)]
    pub noise_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Output directory for the reports.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    #[arg(long)]
    pub rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Text to corrupt; standard input (one line at a time) otherwise.
    #[arg(long)]
    pub text: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Service configuration (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Engine configuration, when no service file is given.
    #[arg(long)]
    pub engine: Option<PathBuf>,
    #[arg(long)]
    pub bind: Option<SocketAddr>,
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BackendCommand {
    /// Train an n-gram model and serve it over the wire protocol.
    ServeNgram(ServeNgramArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    CharDirect,
    ClosedWord,
    Subword,
}

impl From<KindArg> for BackendKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::CharDirect => BackendKind::CharDirect,
            KindArg::ClosedWord => BackendKind::ClosedWord,
            KindArg::Subword => BackendKind::Subword,
        }
    }
}

#[derive(Debug, Args)]
pub struct ServeNgramArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value = "phrase-lines")]
    pub format: FormatArg,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, value_enum, default_value = "char-direct")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 0.01)]
    pub smoothing: f64,
    /// Subword vocabulary TSV; derived from the corpus when absent.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8077")]
    pub bind: SocketAddr,
}

/// Display form of a ranked character.
pub fn char_label(c: char) -> String {
    if c == ' ' {
        "<sp>".into()
    } else {
        c.to_string()
    }
}

/// `rank char probability` lines.
pub fn format_ranking(ranking: &[RankedChar]) -> String {
    ranking
        .iter()
        .enumerate()
        .map(|(i, r)| format!("{} {} {:.6}\n", i + 1, char_label(r.ch), r.prob))
        .collect()
}

fn predict(args: &PredictArgs) -> Result<(), Error> {
    let engine = EngineConfig::load(&args.config)?.build()?;
    let text = args.text.to_lowercase();
    let mut ranking = engine.predict(&text)?;
    if let Some(k) = args.top_k {
        ranking.truncate(k);
    }
    print!("{}", format_ranking(&ranking));
    Ok(())
}

fn campaign_from_args(args: &EvaluateArgs) -> Result<CampaignConfig, Error> {
    let mut cfg = match &args.campaign {
        Some(p) => CampaignConfig::load(p)?,
        None => {
            let (Some(engine), Some(dataset)) = (&args.engine, &args.dataset) else {
                return Err(Error::Usage(
                    "evaluate needs --campaign or both --engine and --dataset".into(),
                ));
            };
            CampaignConfig {
                engine: engine.clone(),
                dataset: dataset.clone(),
                format: CorpusFormat::PhraseLines,
                transcript: TranscriptOptions::default(),
                noise: None,
                repeats: 1,
                out: PathBuf::from("reports"),
                label: None,
                formats: vec![ReportFormat::Csv, ReportFormat::Table, ReportFormat::Json],
            }
        }
    };
    if let Some(e) = &args.engine {
        cfg.engine = e.clone();
    }
    if let Some(d) = &args.dataset {
        cfg.dataset = d.clone();
    }
    if let Some(f) = args.format {
        cfg.format = f.into();
    }
    if let Some(r) = args.repeats {
        cfg.repeats = r;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if args.label.is_some() {
        cfg.label = args.label.clone();
    }
    if let Some(rate) = args.noise_rate {
        let seed = args.seed.or(cfg.noise.map(|n| n.seed)).unwrap_or(0);
        cfg.noise = Some(NoiseSpec::new(rate, seed).map_err(Error::Usage)?);
    } else if let (Some(seed), Some(n)) = (args.seed, cfg.noise.as_mut()) {
        n.seed = seed;
    }
    Ok(cfg)
}

fn run_evaluate(args: &EvaluateArgs) -> Result<(), Error> {
    let cfg = campaign_from_args(args)?;
    let ev = evaluate(&cfg)?;
    let mut rows = vec![(ev.clean.label.as_str(), &ev.clean.overall)];
    if let Some(n) = &ev.noisy {
        rows.push((n.label.as_str(), &n.overall));
    }
    print!("{}", render_table(&rows, false));
    if let Some(d) = &ev.delta {
        print!(
            "\n{}",
            render_table(&[(d.label.as_str(), &d.overall)], true)
        );
    }
    let failed = ev.clean.failed_trials + ev.noisy.as_ref().map_or(0, |n| n.failed_trials);
    if failed > 0 {
        eprintln!("{failed} trials failed and were excluded");
    }
    eprintln!("reports written to {}", cfg.out.display());
    Ok(())
}

fn run_corrupt(args: &CorruptArgs) -> Result<(), Error> {
    let spec = NoiseSpec::new(args.rate, args.seed).map_err(Error::Usage)?;
    match &args.text {
        Some(t) => println!("{}", corrupt(&t.to_lowercase(), &spec)),
        None => {
            let stdin = std::io::stdin();
            let mut out = std::io::stdout().lock();
            for (i, line) in stdin.lock().lines().enumerate() {
                let line = line?.to_lowercase();
                let mut rng = spec.rng_for(i as u64, 0);
                let noisy = charpilot_core::noise::corrupt_with(&line, spec.rate, &mut rng);
                writeln!(out, "{noisy}")?;
            }
        }
    }
    Ok(())
}

fn service_config(args: &ServeArgs) -> Result<ServiceConfig, Error> {
    let mut cfg = match (&args.config, &args.engine) {
        (Some(p), _) => ServiceConfig::load(p)?,
        (None, Some(e)) => ServiceConfig::new(e.clone()),
        (None, None) => match std::env::var(service::ENGINE_ENV) {
            Ok(e) => ServiceConfig::new(e.into()),
            Err(_) => {
                return Err(Error::Usage(format!(
                    "serve needs --config, --engine or {}",
                    service::ENGINE_ENV
                )))
            }
        },
    };
    if let Some(e) = &args.engine {
        cfg.engine = e.clone();
    }
    if let Some(d) = &args.static_dir {
        cfg.static_dir = Some(d.clone());
    }
    cfg.apply_env()?;
    if let Some(b) = args.bind {
        cfg.bind = b;
    }
    Ok(cfg)
}

fn serve_ngram(args: &ServeNgramArgs) -> Result<(), Error> {
    let alphabet = Alphabet::default();
    let phrases = load_corpus(
        &args.corpus,
        args.format.into(),
        &TranscriptOptions::default(),
    )?;
    let kind: BackendKind = args.kind.into();
    let vocab = match (&args.vocab, kind) {
        (Some(p), _) => Some(Arc::new(load_vocab(p, kind.vocab_kind(), &alphabet)?)),
        (None, BackendKind::Subword) => Some(Arc::new(
            Vocabulary::subword_from_corpus(&phrases, &alphabet, 2000, 400)
                .map_err(charpilot_core::error::ConfigError::from)?,
        )),
        _ => None,
    };
    let model = train_ngram(&phrases, kind, &alphabet, vocab, args.order, args.smoothing)
        .map_err(charpilot_core::error::ConfigError::from)?;
    runtime()?.block_on(backend_server::serve(Arc::new(model), args.bind))
}

fn load_vocab(path: &Path, kind: VocabKind, alphabet: &Alphabet) -> Result<Vocabulary, Error> {
    Ok(Vocabulary::load_tsv(path, kind, alphabet)
        .map_err(charpilot_core::error::ConfigError::from)?)
}

fn runtime() -> Result<tokio::runtime::Runtime, Error> {
    Ok(tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?)
}

pub fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Predict(a) => predict(&a),
        Command::Evaluate(a) => run_evaluate(&a),
        Command::Corrupt(a) => run_corrupt(&a),
        Command::Serve(a) => {
            let cfg = service_config(&a)?;
            runtime()?.block_on(service::serve(cfg))
        }
        Command::Backend(BackendCommand::ServeNgram(a)) => serve_ngram(&a),
    }
}

pub fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
