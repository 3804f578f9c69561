//! Sleep spindles: sigma-band envelope excursions above an adaptive
//! (median-anchored) threshold, gated by duration.

use super::{true_runs, AnnotationKind, DetectorError, MicroAnnotation};
use crate::config::SpindleConfig;
use crate::dsp;
use crate::recording::Channel;
use crate::stats;

pub fn detect_spindles(
    ch: &Channel,
    cfg: &SpindleConfig,
) -> Result<Vec<MicroAnnotation>, DetectorError> {
    let filtered = dsp::bandpass(&ch.samples, ch.sample_rate, cfg.band)
        .map_err(DetectorError::wrap("spindle", ch))?;
    let envelope = dsp::moving_rms(&filtered, ch.sample_rate, cfg.rms_window_s);
    if envelope.is_empty() {
        return Ok(Vec::new());
    }
    let threshold = cfg.median_factor * stats::median(&envelope);
    let fs = ch.sample_rate;

    Ok(true_runs(envelope.iter().map(|&v| v > threshold))
        .into_iter()
        .filter(|&(s, e)| {
            let d = (e - s) as f64 / fs;
            d >= cfg.min_duration_s && d <= cfg.max_duration_s
        })
        .map(|(s, e)| MicroAnnotation {
            kind: AnnotationKind::Spindle,
            start_s: s as f64 / fs,
            end_s: e as f64 / fs,
            channel: ch.role,
            score: 1.0,
        })
        .collect())
}
