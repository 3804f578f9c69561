//! Night-level priors computed once per recording before any epoch is
//! scored: whether the subject generates alpha rhythm with eyes closed, and
//! the chin-EMG envelope baseline the tone classifier normalizes against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EngineConfig;
use crate::dsp::{self, DspError};
use crate::recording::{Recording, Role};
use crate::stats;

/// Percentiles of the chin moving-RMS envelope over the whole night.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmgBaseline {
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NightProfile {
    /// True when enough of the night shows a dominant posterior alpha
    /// rhythm for alpha-based rules to be meaningful for this subject.
    pub generates_alpha_rhythm: bool,
    /// Union length (seconds) of qualifying alpha windows on the chosen
    /// channel.
    pub alpha_evidence_s: f64,
    /// The channel the survey settled on; alpha annotations are produced
    /// from this channel only.
    pub alpha_channel: Role,
    /// Set when no occipital derivation was available and a central one
    /// stood in for it.
    pub alpha_fallback_used: bool,
    pub emg_baseline: EmgBaseline,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("no occipital or central channel is available for the alpha survey")]
    NoAlphaChannel,
    #[error("chin EMG channel is not bound")]
    MissingChinEmg,
    #[error("alpha survey failed on channel '{channel}': {source}")]
    AlphaSurvey {
        channel: String,
        #[source]
        source: DspError,
    },
}

const OCCIPITAL: [Role; 2] = [Role::O2M1, Role::O1M2];
const CENTRAL_FALLBACK: [Role; 2] = [Role::C4M1, Role::C3M2];

/// Union length of windows whose alpha-band share qualifies.
fn alpha_evidence_s(rec: &Recording, role: Role, cfg: &EngineConfig) -> Result<f64, ProfileError> {
    let ch = rec
        .channel(role)
        .expect("caller passes only bound roles");
    let windows = dsp::sliding_band_ratio(
        &ch.samples,
        ch.sample_rate,
        cfg.alpha.window_s,
        cfg.alpha.step_s,
        cfg.alpha.band,
    )
    .map_err(|source| ProfileError::AlphaSurvey { channel: ch.label.clone(), source })?;

    let mut evidence = 0.0;
    let mut covered_until = f64::NEG_INFINITY;
    for w in windows {
        if w.ratio < cfg.alpha.min_relative_power {
            continue;
        }
        let start = w.start_s.max(covered_until);
        if w.end_s > start {
            evidence += w.end_s - start;
            covered_until = w.end_s;
        }
    }
    Ok(evidence)
}

/// Survey the recording once and freeze the per-night priors.
pub fn build_night_profile(
    rec: &Recording,
    cfg: &EngineConfig,
) -> Result<NightProfile, ProfileError> {
    let (candidates, fallback): (&[Role], bool) =
        if OCCIPITAL.iter().any(|&r| rec.channel(r).is_some()) {
            (&OCCIPITAL, false)
        } else if CENTRAL_FALLBACK.iter().any(|&r| rec.channel(r).is_some()) {
            (&CENTRAL_FALLBACK, true)
        } else {
            return Err(ProfileError::NoAlphaChannel);
        };

    let mut best: Option<(Role, f64)> = None;
    for &role in candidates {
        if rec.channel(role).is_none() {
            continue;
        }
        let evidence = alpha_evidence_s(rec, role, cfg)?;
        let better = match best {
            Some((_, cur)) => evidence > cur,
            None => true,
        };
        if better {
            best = Some((role, evidence));
        }
    }
    let (alpha_channel, alpha_evidence_s) = best.expect("candidate list is non-empty");

    let chin = rec.channel(Role::ChinEMG).ok_or(ProfileError::MissingChinEmg)?;
    let envelope = dsp::moving_rms(&chin.samples, chin.sample_rate, cfg.emg.rms_window_s);
    let emg_baseline = EmgBaseline {
        p10: stats::percentile(&envelope, 10.0),
        p50: stats::percentile(&envelope, 50.0),
        p90: stats::percentile(&envelope, 90.0),
    };

    Ok(NightProfile {
        generates_alpha_rhythm: alpha_evidence_s >= cfg.profile.alpha_evidence_min_s,
        alpha_evidence_s,
        alpha_channel,
        alpha_fallback_used: fallback,
        emg_baseline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recording::Channel;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    const FS: f64 = 128.0;

    fn noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect()
    }

    /// Noise with 10 Hz bursts planted over the given spans.
    fn occipital(total_s: f64, bursts: &[(f64, f64)], seed: u64) -> Vec<f64> {
        let n = (total_s * FS) as usize;
        let mut x = noise(n, 15.0, seed);
        for &(t0, t1) in bursts {
            let (i0, i1) = ((t0 * FS) as usize, (t1 * FS) as usize);
            for i in i0..i1.min(n) {
                x[i] += 40.0 * (2.0 * std::f64::consts::PI * 10.0 * i as f64 / FS).sin();
            }
        }
        x
    }

    fn chan(label: &str, role: Role, samples: Vec<f64>) -> Channel {
        let mut c = Channel::new(label, FS, samples);
        c.role = role;
        c
    }

    fn rec(channels: Vec<Channel>) -> Recording {
        let duration = channels
            .iter()
            .map(Channel::duration_s)
            .fold(0.0, f64::max);
        Recording::new(channels, duration)
    }

    fn flat_chin(total_s: f64) -> Channel {
        let n = (total_s * FS) as usize;
        let x = (0..n).map(|i| 8.0 * (2.0 * std::f64::consts::PI * 40.0 * i as f64 / FS).sin());
        chan("Chin1-Chin2", Role::ChinEMG, x.collect())
    }

    #[test]
    fn ninety_seconds_of_alpha_flags_a_generator() {
        let rec = rec(vec![
            chan("O2-M1", Role::O2M1, occipital(300.0, &[(10.0, 40.0), (100.0, 130.0), (200.0, 230.0)], 1)),
            flat_chin(300.0),
        ]);
        let p = build_night_profile(&rec, &EngineConfig::default()).unwrap();
        assert!(p.generates_alpha_rhythm);
        assert_eq!(p.alpha_channel, Role::O2M1);
        assert!(!p.alpha_fallback_used);
        assert!(
            p.alpha_evidence_s >= 80.0 && p.alpha_evidence_s <= 100.0,
            "evidence {}",
            p.alpha_evidence_s
        );
    }

    #[test]
    fn twenty_seconds_of_alpha_does_not() {
        let rec = rec(vec![
            chan("O2-M1", Role::O2M1, occipital(300.0, &[(50.0, 70.0)], 2)),
            flat_chin(300.0),
        ]);
        let p = build_night_profile(&rec, &EngineConfig::default()).unwrap();
        assert!(!p.generates_alpha_rhythm);
        assert!(p.alpha_evidence_s < 30.0, "evidence {}", p.alpha_evidence_s);
    }

    #[test]
    fn central_fallback_is_flagged() {
        let rec = rec(vec![
            chan("C4-M1", Role::C4M1, occipital(300.0, &[(10.0, 80.0)], 3)),
            flat_chin(300.0),
        ]);
        let p = build_night_profile(&rec, &EngineConfig::default()).unwrap();
        assert!(p.alpha_fallback_used);
        assert_eq!(p.alpha_channel, Role::C4M1);
    }

    #[test]
    fn no_usable_channel_is_an_error() {
        let rec = rec(vec![
            chan("F4-M1", Role::F4M1, noise(1280, 15.0, 4)),
            flat_chin(10.0),
        ]);
        assert!(matches!(
            build_night_profile(&rec, &EngineConfig::default()),
            Err(ProfileError::NoAlphaChannel)
        ));
    }

    #[test]
    fn missing_chin_is_an_error() {
        let rec = rec(vec![chan("O2-M1", Role::O2M1, noise(1280, 15.0, 5))]);
        assert!(matches!(
            build_night_profile(&rec, &EngineConfig::default()),
            Err(ProfileError::MissingChinEmg)
        ));
    }

    #[test]
    fn baseline_of_a_constant_tone_collapses_to_its_rms() {
        let rec = rec(vec![
            chan("O2-M1", Role::O2M1, noise((300.0 * FS) as usize, 15.0, 6)),
            flat_chin(300.0),
        ]);
        let p = build_night_profile(&rec, &EngineConfig::default()).unwrap();
        let rms = 8.0 / 2.0_f64.sqrt();
        for v in [p.emg_baseline.p10, p.emg_baseline.p50, p.emg_baseline.p90] {
            assert!((v - rms).abs() / rms < 0.02, "{v} vs {rms}");
        }
    }

    #[test]
    fn two_level_night_spreads_the_percentiles() {
        let n = (300.0 * FS) as usize;
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let a = if i < n / 2 { 5.0 } else { 20.0 };
                a * (2.0 * std::f64::consts::PI * 40.0 * i as f64 / FS).sin()
            })
            .collect();
        let rec = rec(vec![
            chan("O2-M1", Role::O2M1, noise(n, 15.0, 7)),
            chan("Chin1-Chin2", Role::ChinEMG, x),
        ]);
        let p = build_night_profile(&rec, &EngineConfig::default()).unwrap();
        let lo = 5.0 / 2.0_f64.sqrt();
        let hi = 20.0 / 2.0_f64.sqrt();
        assert!((p.emg_baseline.p10 - lo).abs() / lo < 0.05, "p10 {}", p.emg_baseline.p10);
        assert!((p.emg_baseline.p90 - hi).abs() / hi < 0.05, "p90 {}", p.emg_baseline.p90);
    }
}
