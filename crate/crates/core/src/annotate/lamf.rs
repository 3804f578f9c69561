//! Low-amplitude mixed-frequency activity: sustained stretches where the
//! rectified signal stays under an amplitude threshold derived from the
//! whole channel, that also carry theta-range (4–7 Hz) content.

use super::{true_runs, AnnotationKind, DetectorError, MicroAnnotation};
use crate::config::LamfConfig;
use crate::dsp;
use crate::recording::Channel;

pub fn detect_lamf(ch: &Channel, cfg: &LamfConfig) -> Result<Vec<MicroAnnotation>, DetectorError> {
    let x = &ch.samples;
    if x.is_empty() {
        return Ok(Vec::new());
    }
    let n = x.len() as f64;
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let mean = abs.iter().sum::<f64>() / n;
    let var = abs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let theta = mean - cfg.std_coefficient * var.sqrt();

    let fs = ch.sample_rate;
    let min_len = ((cfg.min_run_s * fs).ceil() as usize).max(2);

    let mut out = Vec::new();
    for (s, e) in true_runs(abs.iter().map(|&v| v < theta)) {
        if e - s < min_len {
            continue;
        }
        let psd = dsp::welch_psd(&x[s..e], fs, cfg.min_run_s, 0.5)
            .map_err(|err| DetectorError { detector: "LAMF", channel: ch.label.clone(), source: err })?;
        let ratio = dsp::relative_band_power(&psd, cfg.band)
            .map_err(|err| DetectorError { detector: "LAMF", channel: ch.label.clone(), source: err })?;
        if ratio >= cfg.min_relative_power {
            out.push(MicroAnnotation {
                kind: AnnotationKind::Lamf,
                start_s: s as f64 / fs,
                end_s: e as f64 / fs,
                channel: ch.role,
                score: ratio,
            });
        }
    }
    Ok(out)
}
