//! Alpha rhythm: sliding spectral windows whose 8–12 Hz share dominates,
//! merged into contiguous events.

use super::{merge_intervals, AnnotationKind, DetectorError, MicroAnnotation};
use crate::config::AlphaConfig;
use crate::dsp;
use crate::recording::Channel;

pub fn detect_alpha(ch: &Channel, cfg: &AlphaConfig) -> Result<Vec<MicroAnnotation>, DetectorError> {
    let windows = dsp::sliding_band_ratio(
        &ch.samples,
        ch.sample_rate,
        cfg.window_s,
        cfg.step_s,
        cfg.band,
    )
    .map_err(DetectorError::wrap("alpha", ch))?;

    let qualifying: Vec<&dsp::BandRatioWindow<f64>> =
        windows.iter().filter(|w| w.ratio >= cfg.min_relative_power).collect();
    let merged = merge_intervals(qualifying.iter().map(|w| (w.start_s, w.end_s)).collect());

    Ok(merged
        .into_iter()
        .map(|(start_s, end_s)| {
            let score = qualifying
                .iter()
                .filter(|w| w.start_s < end_s && w.end_s > start_s)
                .map(|w| w.ratio)
                .fold(0.0, f64::max);
            MicroAnnotation {
                kind: AnnotationKind::Alpha,
                start_s,
                end_s,
                channel: ch.role,
                score,
            }
        })
        .collect())
}
