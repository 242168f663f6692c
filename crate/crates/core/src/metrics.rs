//! Rank-based metrics over character predictions.
//!
//! MRR@k averages `1/rank` over trials, counting 0 when the target is not
//! in the top k. Recall@k is the fraction of trials whose target is in the
//! top k.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::text::PredictionInstance;

/// Cutoffs reported everywhere, in table order.
pub const REPORT_KS: [usize; 3] = [10, 5, 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub instance: PredictionInstance,
    /// 1-based rank of the target in the engine's ranking.
    pub rank: usize,
    /// Head of the ranking, best first.
    pub top_chars: Vec<char>,
}

fn check(ranks_len: usize, k: usize) -> Result<(), MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroK);
    }
    if ranks_len == 0 {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

pub fn mrr_at_k_ranks(ranks: &[usize], k: usize) -> Result<f64, MetricsError> {
    check(ranks.len(), k)?;
    let sum: f64 = ranks
        .iter()
        .filter(|&&r| r <= k)
        .map(|&r| 1.0 / r as f64)
        .sum();
    Ok(sum / ranks.len() as f64)
}

pub fn recall_at_k_ranks(ranks: &[usize], k: usize) -> Result<f64, MetricsError> {
    check(ranks.len(), k)?;
    let hits = ranks.iter().filter(|&&r| r <= k).count();
    Ok(hits as f64 / ranks.len() as f64)
}

pub fn mrr_at_k(results: &[TrialResult], k: usize) -> Result<f64, MetricsError> {
    mrr_at_k_ranks(&results.iter().map(|r| r.rank).collect::<Vec<_>>(), k)
}

pub fn recall_at_k(results: &[TrialResult], k: usize) -> Result<f64, MetricsError> {
    recall_at_k_ranks(&results.iter().map(|r| r.rank).collect::<Vec<_>>(), k)
}

/// MRR@k and Recall@k for each k of [`REPORT_KS`], plus the trial count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub trials: usize,
    /// Indexed like [`REPORT_KS`].
    pub mrr: [f64; 3],
    pub recall: [f64; 3],
}

impl MetricRow {
    pub fn from_ranks(ranks: &[usize]) -> Result<Self, MetricsError> {
        let mut mrr = [0.0; 3];
        let mut recall = [0.0; 3];
        for (i, &k) in REPORT_KS.iter().enumerate() {
            mrr[i] = mrr_at_k_ranks(ranks, k)?;
            recall[i] = recall_at_k_ranks(ranks, k)?;
        }
        Ok(Self {
            trials: ranks.len(),
            mrr,
            recall,
        })
    }

    pub fn mrr_at(&self, k: usize) -> Option<f64> {
        REPORT_KS.iter().position(|&x| x == k).map(|i| self.mrr[i])
    }

    pub fn recall_at(&self, k: usize) -> Option<f64> {
        REPORT_KS
            .iter()
            .position(|&x| x == k)
            .map(|i| self.recall[i])
    }

    /// Columns in table order: MRR@10, Recall@10, MRR@5, Recall@5, MRR@3, Recall@3.
    pub fn columns(&self) -> [f64; 6] {
        [
            self.mrr[0],
            self.recall[0],
            self.mrr[1],
            self.recall[1],
            self.mrr[2],
            self.recall[2],
        ]
    }

    /// Fieldwise `self - baseline`; the trial count is kept from `self`.
    pub fn minus(&self, baseline: &MetricRow) -> MetricRow {
        let mut out = *self;
        for i in 0..3 {
            out.mrr[i] -= baseline.mrr[i];
            out.recall[i] -= baseline.recall[i];
        }
        out
    }

    /// Checks `MRR@k <= Recall@k` and monotonicity in k.
    pub fn check_invariants(&self) -> Result<(), String> {
        const EPS: f64 = 1e-12;
        for (i, k) in REPORT_KS.into_iter().enumerate() {
            if !(0.0..=1.0 + EPS).contains(&self.recall[i]) || self.mrr[i] < -EPS {
                return Err(format!("metrics at k={k} out of range"));
            }
            if self.mrr[i] > self.recall[i] + EPS {
                return Err(format!(
                    "MRR@{k} {} exceeds Recall@{k} {}",
                    self.mrr[i], self.recall[i]
                ));
            }
        }
        // REPORT_KS is descending
        for i in 0..2 {
            if self.mrr[i] + EPS < self.mrr[i + 1] || self.recall[i] + EPS < self.recall[i + 1] {
                return Err(format!(
                    "metrics decrease from k={} to k={}",
                    REPORT_KS[i + 1],
                    REPORT_KS[i]
                ));
            }
        }
        Ok(())
    }
}

/// Campaign output: overall metrics plus slices by position in the word and
/// by number of context words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub label: String,
    pub overall: MetricRow,
    pub by_position: BTreeMap<usize, MetricRow>,
    pub by_context: BTreeMap<usize, MetricRow>,
    pub trial_count: usize,
    pub failed_trials: usize,
    pub repeats: usize,
}

impl MetricsReport {
    /// Builds the report from trial results (pooled over repeats).
    pub fn from_results(
        label: &str,
        results: &[TrialResult],
        failed_trials: usize,
        repeats: usize,
    ) -> Result<Self, MetricsError> {
        let ranks: Vec<usize> = results.iter().map(|r| r.rank).collect();
        let overall = MetricRow::from_ranks(&ranks)?;
        let mut pos: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut ctx: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for r in results {
            pos.entry(r.instance.position_in_word)
                .or_default()
                .push(r.rank);
            ctx.entry(r.instance.context_words)
                .or_default()
                .push(r.rank);
        }
        let slice =
            |m: BTreeMap<usize, Vec<usize>>| -> Result<BTreeMap<usize, MetricRow>, MetricsError> {
                m.into_iter()
                    .map(|(k, v)| Ok((k, MetricRow::from_ranks(&v)?)))
                    .collect()
            };
        Ok(Self {
            label: label.to_string(),
            overall,
            by_position: slice(pos)?,
            by_context: slice(ctx)?,
            trial_count: results.len(),
            failed_trials,
            repeats,
        })
    }

    /// Checks the metric invariants on every row of the report.
    pub fn check_invariants(&self) -> Result<(), String> {
        self.overall.check_invariants()?;
        for (p, row) in &self.by_position {
            row.check_invariants()
                .map_err(|e| format!("position {p}: {e}"))?;
        }
        for (c, row) in &self.by_context {
            row.check_invariants()
                .map_err(|e| format!("context {c}: {e}"))?;
        }
        Ok(())
    }
}

/// Change from a clean run to a noisy one (`noisy - clean`, so degradation
/// is negative).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub label: String,
    pub overall: MetricRow,
    pub by_position: BTreeMap<usize, MetricRow>,
    pub by_context: BTreeMap<usize, MetricRow>,
}

impl DeltaReport {
    /// Slices present in only one report are left out.
    pub fn between(clean: &MetricsReport, noisy: &MetricsReport) -> Self {
        let diff = |a: &BTreeMap<usize, MetricRow>, b: &BTreeMap<usize, MetricRow>| {
            b.iter()
                .filter_map(|(k, nr)| a.get(k).map(|cr| (*k, nr.minus(cr))))
                .collect()
        };
        Self {
            label: noisy.label.clone(),
            overall: noisy.overall.minus(&clean.overall),
            by_position: diff(&clean.by_position, &noisy.by_position),
            by_context: diff(&clean.by_context, &noisy.by_context),
        }
    }
}
