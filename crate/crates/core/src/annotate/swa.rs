//! Slow wave activity: full waves of the delta-filtered signal (consecutive
//! half-wave pairs, sliding by one half-wave) that are both large and slow
//! enough.

use super::{sign_changes, AnnotationKind, DetectorError, MicroAnnotation};
use crate::config::SwaConfig;
use crate::dsp;
use crate::recording::Channel;

pub fn detect_swa(ch: &Channel, cfg: &SwaConfig) -> Result<Vec<MicroAnnotation>, DetectorError> {
    let filtered = dsp::bandpass(&ch.samples, ch.sample_rate, cfg.band)
        .map_err(DetectorError::wrap("SWA", ch))?;
    let crossings = sign_changes(&filtered);
    let fs = ch.sample_rate;

    let mut out = Vec::new();
    for w in crossings.windows(3) {
        let (c0, c2) = (w[0], w[2]);
        let duration = (c2 - c0) as f64 / fs;
        if duration < cfg.min_duration_s || duration > cfg.max_duration_s {
            continue;
        }
        let seg = &filtered[c0..c2];
        let hi = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = seg.iter().copied().fold(f64::INFINITY, f64::min);
        if hi - lo >= cfg.min_peak_to_peak_uv {
            out.push(MicroAnnotation {
                kind: AnnotationKind::Swa,
                start_s: c0 as f64 / fs,
                end_s: c2 as f64 / fs,
                channel: ch.role,
                score: 1.0,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{merge_intervals, testutil::{add_tone, chan, noise}};
    use crate::recording::Role;

    const FS: f64 = 128.0;

    #[test]
    fn sustained_delta_covers_the_window() {
        let mut x = noise((30.0 * FS) as usize, 5.0, 31);
        add_tone(&mut x, FS, 1.0, 55.0, 0.0, 30.0, 0.0);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        let anns = detect_swa(&ch, &Default::default()).unwrap();
        assert!(anns.len() >= 25, "{} waves", anns.len());
        for a in &anns {
            assert!(a.duration_s() >= 0.5 && a.duration_s() <= 2.0);
        }
        let union: f64 = merge_intervals(anns.iter().map(|a| (a.start_s, a.end_s)).collect())
            .iter()
            .map(|(s, e)| e - s)
            .sum();
        assert!(union >= 27.0, "union {union}");
    }

    #[test]
    fn small_delta_fails_the_amplitude_gate() {
        let mut x = noise((30.0 * FS) as usize, 5.0, 32);
        add_tone(&mut x, FS, 1.0, 15.0, 0.0, 30.0, 0.0);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        assert!(detect_swa(&ch, &Default::default()).unwrap().is_empty());
    }

    #[test]
    fn very_slow_waves_fail_the_duration_gate() {
        let mut x = vec![0.0; (40.0 * FS) as usize];
        add_tone(&mut x, FS, 0.25, 100.0, 0.0, 40.0, 0.0);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        assert!(detect_swa(&ch, &Default::default()).unwrap().is_empty());
    }

    #[test]
    fn fast_waves_fail_the_duration_gate() {
        let mut x = vec![0.0; (30.0 * FS) as usize];
        add_tone(&mut x, FS, 3.0, 60.0, 0.0, 30.0, 0.0);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        assert!(detect_swa(&ch, &Default::default()).unwrap().is_empty());
    }
}
