//! K-complexes: a sharp negative trough followed promptly by a positive
//! rebound, sized and bounded by the surrounding zero crossings. Off by
//! default; the orchestrator only calls this when enabled.

use super::{sign_changes, AnnotationKind, DetectorError, MicroAnnotation};
use crate::config::KComplexConfig;
use crate::dsp;
use crate::recording::Channel;

pub fn detect_kcomplexes(
    ch: &Channel,
    cfg: &KComplexConfig,
) -> Result<Vec<MicroAnnotation>, DetectorError> {
    let f = dsp::bandpass(&ch.samples, ch.sample_rate, cfg.band)
        .map_err(DetectorError::wrap("K-complex", ch))?;
    let crossings = sign_changes(&f);
    let fs = ch.sample_rate;

    let mut out: Vec<MicroAnnotation> = Vec::new();
    let mut i = 1usize;
    while i + 1 < f.len() {
        let is_trough = f[i] <= -cfg.min_negative_peak_uv && f[i] <= f[i - 1] && f[i] < f[i + 1];
        if !is_trough {
            i += 1;
            continue;
        }
        let limit = (i + (cfg.rebound_within_s * fs) as usize).min(f.len());
        let peak = (i..limit).max_by(|&a, &b| f[a].total_cmp(&f[b])).unwrap_or(i);
        let rebounds = f[peak] > 0.0 && f[peak] - f[i] >= cfg.min_peak_to_peak_uv;
        if rebounds {
            // Event spans from the crossing into the trough's half-wave to
            // the crossing that closes the rebound's.
            let before = crossings.partition_point(|&c| c <= i);
            let after = crossings.partition_point(|&c| c <= peak);
            if let (Some(&s), Some(&e)) = (
                before.checked_sub(1).and_then(|k| crossings.get(k)),
                crossings.get(after),
            ) {
                let duration = (e - s) as f64 / fs;
                let start_s = s as f64 / fs;
                let clear = out.last().map_or(true, |last| start_s >= last.end_s);
                if duration >= cfg.min_duration_s && duration <= cfg.max_duration_s && clear {
                    out.push(MicroAnnotation {
                        kind: AnnotationKind::KComplex,
                        start_s,
                        end_s: e as f64 / fs,
                        channel: ch.role,
                        score: 1.0,
                    });
                    i = e;
                    continue;
                }
            }
        }
        i += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::testutil::{chan, noise};
    use crate::recording::Role;

    const FS: f64 = 128.0;

    fn half_sine(x: &mut [f64], fs: f64, t0: f64, amp: f64, dur: f64) {
        let i0 = (t0 * fs) as usize;
        let len = (dur * fs) as usize;
        for k in 0..len {
            x[i0 + k] += amp * (std::f64::consts::PI * k as f64 / len as f64).sin();
        }
    }

    fn enabled() -> KComplexConfig {
        KComplexConfig { enabled: true, ..Default::default() }
    }

    #[test]
    fn biphasic_complex_is_found() {
        let mut x = noise((40.0 * FS) as usize, 4.0, 61);
        half_sine(&mut x, FS, 15.0, -60.0, 0.35);
        half_sine(&mut x, FS, 15.35, 45.0, 0.45);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        let anns = detect_kcomplexes(&ch, &enabled()).unwrap();
        assert_eq!(anns.len(), 1, "{anns:?}");
        let a = &anns[0];
        assert!((a.start_s - 15.0).abs() <= 0.25, "start {}", a.start_s);
        assert!((a.end_s - 15.8).abs() <= 0.35, "end {}", a.end_s);
    }

    #[test]
    fn trough_without_a_real_rebound_is_rejected() {
        let mut x = noise((40.0 * FS) as usize, 4.0, 62);
        half_sine(&mut x, FS, 15.0, -50.0, 0.35);
        half_sine(&mut x, FS, 16.8, 45.0, 0.45);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        assert!(detect_kcomplexes(&ch, &enabled()).unwrap().is_empty());
    }

    #[test]
    fn slow_wide_complex_fails_the_duration_gate() {
        let mut x = noise((40.0 * FS) as usize, 4.0, 63);
        half_sine(&mut x, FS, 15.0, -60.0, 1.0);
        half_sine(&mut x, FS, 16.0, 60.0, 1.0);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        assert!(detect_kcomplexes(&ch, &enabled()).unwrap().is_empty());
    }

    #[test]
    fn shallow_trough_is_ignored() {
        let mut x = noise((40.0 * FS) as usize, 4.0, 64);
        half_sine(&mut x, FS, 15.0, -25.0, 0.35);
        half_sine(&mut x, FS, 15.35, 60.0, 0.45);
        let ch = chan("F4-M1", Role::F4M1, FS, x);
        assert!(detect_kcomplexes(&ch, &enabled()).unwrap().is_empty());
    }
}
