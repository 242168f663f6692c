//! Evaluation campaigns: run an engine over prediction instances and score it.

use rayon::prelude::*;

use crate::config::{CampaignConfig, EngineConfig};
use crate::corpus::load_corpus_with;
use crate::error::{CampaignError, Error, PredictError};
use crate::metrics::{DeltaReport, MetricsReport, TrialResult};
use crate::noise::{corrupt_with, NoiseSpec};
use crate::predictor::Engine;
use crate::report::{emit_delta, emit_report};
use crate::text::{corpus_instances, PredictionInstance};

/// Ranking head kept on every trial.
const TOP_CHARS: usize = 10;

#[derive(Clone, Debug)]
pub struct CampaignOutcome {
    pub report: MetricsReport,
    pub results: Vec<TrialResult>,
    /// Messages of failed trials, in trial order.
    pub failures: Vec<String>,
}

/// Ranks `instance.target` given its (possibly corrupted) history.
pub fn run_trial(
    engine: &Engine,
    instance: &PredictionInstance,
    history: &str,
) -> Result<TrialResult, PredictError> {
    let dist = engine.distribution(history)?;
    let alphabet = engine.alphabet();
    let target = alphabet
        .index_of(instance.target)
        .ok_or(PredictError::OutOfAlphabet(instance.target))?;
    let order = dist.order();
    Ok(TrialResult {
        instance: instance.clone(),
        rank: dist.rank_of(target),
        top_chars: order
            .iter()
            .take(TOP_CHARS)
            .map(|&i| alphabet.char_at(i))
            .collect(),
    })
}

/// Evaluates every instance `repeats` times and pools the trials.
///
/// With noise, repeat `r` of instance `i` corrupts its history with the
/// generator `noise.rng_for(i, r)`, so results do not depend on scheduling.
/// Without noise a deterministic backend is evaluated once. Failed trials
/// are excluded and counted; more than 1% failures aborts the campaign.
pub fn run_campaign(
    engine: &Engine,
    instances: &[PredictionInstance],
    noise: Option<&NoiseSpec>,
    repeats: usize,
    label: &str,
) -> Result<CampaignOutcome, CampaignError> {
    if instances.is_empty() {
        return Err(CampaignError::NoInstances);
    }
    if repeats == 0 {
        return Err(CampaignError::ZeroRepeats);
    }
    let deterministic = engine.backend().descriptor().deterministic;
    let runs = if noise.is_none() && deterministic {
        1
    } else {
        repeats
    };

    let jobs: Vec<(usize, usize)> = (0..runs)
        .flat_map(|r| (0..instances.len()).map(move |i| (r, i)))
        .collect();
    let outcomes: Vec<Result<TrialResult, PredictError>> = jobs
        .par_iter()
        .map(|&(r, i)| {
            let inst = &instances[i];
            match noise {
                Some(spec) => {
                    let mut rng = spec.rng_for(i as u64, r as u64);
                    let noisy = corrupt_with(&inst.history, spec.rate, &mut rng);
                    run_trial(engine, inst, &noisy)
                }
                None => run_trial(engine, inst, &inst.history),
            }
        })
        .collect();

    let total = outcomes.len();
    let mut results = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(t) => results.push(t),
            Err(e) => failures.push(e.to_string()),
        }
    }
    if failures.len() * 100 > total {
        return Err(CampaignError::TooManyFailures {
            failed: failures.len(),
            total,
            last_error: failures.last().cloned().unwrap_or_default(),
        });
    }
    let report = MetricsReport::from_results(label, &results, failures.len(), runs)
        .map_err(|_| CampaignError::NoSuccessfulTrials)?;
    Ok(CampaignOutcome {
        report,
        results,
        failures,
    })
}

/// Reports of a configured evaluation; `noisy` and `delta` are present when
/// the campaign has a noise spec.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub clean: MetricsReport,
    pub noisy: Option<MetricsReport>,
    pub delta: Option<DeltaReport>,
    pub files: Vec<std::path::PathBuf>,
}

/// Loads engine and dataset, runs the clean campaign (and the noisy one if
/// configured) and writes the reports to `cfg.out`. Noisy reports go to
/// `cfg.out/noisy`.
pub fn evaluate(cfg: &CampaignConfig) -> Result<Evaluation, Error> {
    let engine_cfg = EngineConfig::load(&cfg.engine)?;
    let engine = engine_cfg.build()?;
    let normalizer = engine_cfg.normalizer()?;
    let phrases = load_corpus_with(&normalizer, &cfg.dataset, cfg.format, &cfg.transcript)?;
    let instances = corpus_instances(&phrases, engine.alphabet())?;
    let label = cfg
        .label
        .clone()
        .unwrap_or_else(|| engine_cfg.display_label());

    let clean = run_campaign(&engine, &instances, None, cfg.repeats, &label)?.report;
    let mut files = emit_report(&clean, &cfg.out, &cfg.formats)?;
    let (noisy, delta) = match &cfg.noise {
        None => (None, None),
        Some(spec) => {
            let noisy_label = format!("{label} ({:.0}% noise)", spec.rate * 100.0);
            let noisy =
                run_campaign(&engine, &instances, Some(spec), cfg.repeats, &noisy_label)?.report;
            let delta = DeltaReport::between(&clean, &noisy);
            let dir = cfg.out.join("noisy");
            files.extend(emit_report(&noisy, &dir, &cfg.formats)?);
            files.extend(emit_delta(&delta, &cfg.out, &cfg.formats)?);
            (Some(noisy), Some(delta))
        }
    };
    Ok(Evaluation {
        clean,
        noisy,
        delta,
        files,
    })
}
