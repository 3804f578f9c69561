//! Rapid eye movements: steep, brief deflections that appear on both EOG
//! derivations at the same time with opposite polarity.

use super::{merge_intervals, true_runs, AnnotationKind, DetectorError, MicroAnnotation};
use crate::config::RemConfig;
use crate::dsp;
use crate::recording::Channel;

#[derive(Debug, Clone, Copy)]
struct Deflection {
    start_s: f64,
    end_s: f64,
    positive: bool,
}

/// Maximal runs of steep slope that complete quickly enough.
fn deflections(ch: &Channel, cfg: &RemConfig) -> Result<Vec<Deflection>, DetectorError> {
    let filtered = dsp::bandpass(&ch.samples, ch.sample_rate, cfg.band)
        .map_err(DetectorError::wrap("REM", ch))?;
    let fs = ch.sample_rate;
    if filtered.len() < 2 {
        return Ok(Vec::new());
    }
    let slope: Vec<f64> = filtered.windows(2).map(|w| (w[1] - w[0]) * fs).collect();

    Ok(true_runs(slope.iter().map(|&v| v.abs() >= cfg.min_slope_uv_per_s))
        .into_iter()
        .filter_map(|(s, e)| {
            let duration = (e - s) as f64 / fs;
            if duration < cfg.min_sustain_s || duration >= cfg.max_deflection_s {
                return None;
            }
            let mean: f64 = slope[s..e].iter().sum::<f64>() / (e - s) as f64;
            Some(Deflection { start_s: s as f64 / fs, end_s: e as f64 / fs, positive: mean > 0.0 })
        })
        .collect())
}

pub fn detect_rems(
    e1: &Channel,
    e2: &Channel,
    cfg: &RemConfig,
) -> Result<Vec<MicroAnnotation>, DetectorError> {
    let d1 = deflections(e1, cfg)?;
    let d2 = deflections(e2, cfg)?;

    // Both lists are sorted by start; walk them with a trailing cursor.
    let mut intervals = Vec::new();
    let mut lo = 0usize;
    for a in &d1 {
        while lo < d2.len() && d2[lo].end_s <= a.start_s {
            lo += 1;
        }
        for b in &d2[lo..] {
            if b.start_s >= a.end_s {
                break;
            }
            if a.positive != b.positive {
                intervals.push((a.start_s.min(b.start_s), a.end_s.max(b.end_s)));
            }
        }
    }

    Ok(merge_intervals(intervals)
        .into_iter()
        .map(|(start_s, end_s)| MicroAnnotation {
            kind: AnnotationKind::Rem,
            start_s,
            end_s,
            channel: e1.role,
            score: 1.0,
        })
        .collect())
}
