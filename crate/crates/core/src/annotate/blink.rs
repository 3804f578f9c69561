//! Eye blinks: conjugate vertical eye movements recurring at a blink-like
//! rhythm. A single annotation spans the whole train.

use super::{merge_intervals, sign_changes, AnnotationKind, DetectorError, MicroAnnotation};
use crate::config::BlinkConfig;
use crate::dsp;
use crate::recording::Channel;

#[derive(Debug, Clone, Copy)]
struct Wave {
    start_s: f64,
    end_s: f64,
    positive: bool,
}

/// Full waves of the filtered signal with a blink-sized swing. Polarity is
/// that of the leading half-wave.
///
/// Full waves slide by one half-wave, so one physical blink shows up as a
/// cluster of overlapping candidates — and when the signal between two
/// blinks has no zero crossing, a "bridge" wave can even span from one
/// blink into the next. Greedily keeping the biggest non-overlapping waves
/// resolves both: each half-wave is claimed by exactly one deflection.
fn big_waves(ch: &Channel, cfg: &BlinkConfig) -> Result<Vec<Wave>, DetectorError> {
    let filtered = dsp::bandpass(&ch.samples, ch.sample_rate, cfg.band)
        .map_err(DetectorError::wrap("blink", ch))?;
    let crossings = sign_changes(&filtered);
    let fs = ch.sample_rate;

    let mut candidates: Vec<(f64, Wave)> = crossings
        .windows(3)
        .filter_map(|w| {
            let seg = &filtered[w[0]..w[2]];
            let hi = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = seg.iter().copied().fold(f64::INFINITY, f64::min);
            if hi - lo < cfg.min_peak_to_peak_uv {
                return None;
            }
            let wave = Wave {
                start_s: w[0] as f64 / fs,
                end_s: w[2] as f64 / fs,
                positive: filtered[w[0]] >= 0.0,
            };
            Some((hi - lo, wave))
        })
        .collect();
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.start_s.total_cmp(&b.1.start_s)));

    let mut kept: Vec<Wave> = Vec::new();
    for (_, w) in candidates {
        if kept.iter().all(|k| w.end_s <= k.start_s || w.start_s >= k.end_s) {
            kept.push(w);
        }
    }
    kept.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
    Ok(kept)
}

pub fn detect_blinks(
    e1: &Channel,
    e2: &Channel,
    cfg: &BlinkConfig,
) -> Result<Vec<MicroAnnotation>, DetectorError> {
    let w1 = big_waves(e1, cfg)?;
    let w2 = big_waves(e2, cfg)?;

    let mut events = Vec::new();
    let mut lo = 0usize;
    for a in &w1 {
        while lo < w2.len() && w2[lo].end_s <= a.start_s {
            lo += 1;
        }
        for b in &w2[lo..] {
            if b.start_s >= a.end_s {
                break;
            }
            if a.positive != b.positive {
                events.push((a.start_s.min(b.start_s), a.end_s.max(b.end_s)));
            }
        }
    }
    let events = merge_intervals(events);
    let mids: Vec<f64> = events.iter().map(|(s, e)| 0.5 * (s + e)).collect();

    let mut out = Vec::new();
    let mut i = 0usize;
    while i < events.len() {
        let mut j = i;
        while j + 1 < events.len() {
            let gap = mids[j + 1] - mids[j];
            if gap >= cfg.min_interval_s && gap <= cfg.max_interval_s {
                j += 1;
            } else {
                break;
            }
        }
        if j + 1 - i >= cfg.min_deflections {
            out.push(MicroAnnotation {
                kind: AnnotationKind::EyeBlink,
                start_s: events[i].0,
                end_s: events[j].1,
                channel: e1.role,
                score: 1.0,
            });
        }
        i = j + 1;
    }
    Ok(out)
}
