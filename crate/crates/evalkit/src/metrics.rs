//! Sleep-architecture metrics and scorer-versus-consensus discrepancies.

use std::collections::BTreeMap;

use noctua_core::stage::StageLabel;
use serde::{Deserialize, Serialize};

use crate::{majority_consensus, EvalError, Hypnogram};

/// One 30 s epoch in minutes.
pub const EPOCH_MINUTES: f64 = 0.5;

/// Architecture summary of one (already cropped) hypnogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SleepMetrics {
    pub tst_min: f64,
    pub sleep_efficiency_pct: f64,
    pub waso_min: f64,
    pub n1_min: f64,
    pub n2_min: f64,
    pub n3_min: f64,
    pub rem_min: f64,
    pub n1_pct: f64,
    pub n2_pct: f64,
    pub n3_pct: f64,
    pub rem_pct: f64,
}

impl SleepMetrics {
    /// Stable field iteration for tabular output and MAD aggregation.
    pub fn fields(&self) -> [(&'static str, f64); 11] {
        [
            ("tst_min", self.tst_min),
            ("sleep_efficiency_pct", self.sleep_efficiency_pct),
            ("waso_min", self.waso_min),
            ("n1_min", self.n1_min),
            ("n2_min", self.n2_min),
            ("n3_min", self.n3_min),
            ("rem_min", self.rem_min),
            ("n1_pct", self.n1_pct),
            ("n2_pct", self.n2_pct),
            ("n3_pct", self.n3_pct),
            ("rem_pct", self.rem_pct),
        ]
    }
}

/// Compute architecture metrics over a hypnogram that has already been
/// cropped to the analysis period; the sleep-efficiency denominator is the
/// full cropped span.
pub fn sleep_metrics(hyp: &Hypnogram) -> Result<SleepMetrics, EvalError> {
    let mut stage_counts = [0usize; 5];
    for s in &hyp.stages {
        stage_counts[s.idx()] += 1;
    }
    let sleep_epochs: usize = StageLabel::ALL
        .iter()
        .filter(|s| s.is_sleep())
        .map(|s| stage_counts[s.idx()])
        .sum();
    if sleep_epochs == 0 {
        return Err(EvalError::NoSleep);
    }

    let onset = hyp.stages.iter().position(|s| s.is_sleep()).unwrap();
    let waso_epochs =
        hyp.stages[onset..].iter().filter(|s| **s == StageLabel::Wake).count();

    let tst_min = sleep_epochs as f64 * EPOCH_MINUTES;
    let minutes = |stage: StageLabel| stage_counts[stage.idx()] as f64 * EPOCH_MINUTES;
    let pct = |m: f64| m / tst_min * 100.0;
    let (n1_min, n2_min, n3_min, rem_min) = (
        minutes(StageLabel::N1),
        minutes(StageLabel::N2),
        minutes(StageLabel::N3),
        minutes(StageLabel::R),
    );

    Ok(SleepMetrics {
        tst_min,
        sleep_efficiency_pct: tst_min / (hyp.epoch_count() as f64 * EPOCH_MINUTES) * 100.0,
        waso_min: waso_epochs as f64 * EPOCH_MINUTES,
        n1_min,
        n2_min,
        n3_min,
        rem_min,
        n1_pct: pct(n1_min),
        n2_pct: pct(n2_min),
        n3_pct: pct(n3_min),
        rem_pct: pct(rem_min),
    })
}

/// Mean absolute difference from the consensus metrics, per field. Empty
/// input yields an empty map.
pub fn mad_vs_consensus(
    sets: &[SleepMetrics],
    consensus: &SleepMetrics,
) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    if sets.is_empty() {
        return out;
    }
    for set in sets {
        for ((name, value), (_, reference)) in set.fields().iter().zip(consensus.fields()) {
            *out.entry((*name).to_owned()).or_insert(0.0) += (value - reference).abs();
        }
    }
    for v in out.values_mut() {
        *v /= sets.len() as f64;
    }
    out
}

/// Human-scorer baseline: each scorer's metrics against the consensus of
/// the remaining scorers, averaged per field. Expects cropped hypnograms.
pub fn leave_one_out_mads(
    scorers: &[Hypnogram],
) -> Result<BTreeMap<String, f64>, EvalError> {
    if scorers.len() < 2 {
        return Err(EvalError::Empty("leave-one-out needs at least two scorers"));
    }
    let mut out = BTreeMap::new();
    for (i, scorer) in scorers.iter().enumerate() {
        let others: Vec<Hypnogram> = scorers
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, h)| h.clone())
            .collect();
        let consensus = majority_consensus(&others)?.consensus;
        let own = sleep_metrics(scorer)?;
        let reference = sleep_metrics(&consensus)?;
        for ((name, value), (_, r)) in own.fields().iter().zip(reference.fields()) {
            *out.entry((*name).to_owned()).or_insert(0.0) += (value - r).abs();
        }
    }
    for v in out.values_mut() {
        *v /= scorers.len() as f64;
    }
    Ok(out)
}
