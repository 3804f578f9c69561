//! Micro-annotation layer: detectors that turn raw channels into typed,
//! timestamped events, and the per-epoch index the rule engine reads.
//!
//! Every detector is a pure function of one or two channels plus its config
//! section, so each can be tested against planted waveforms in isolation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::DspError;
use crate::recording::{Channel, Epoch, Recording, Role};

mod alpha;
mod blink;
mod emg;
mod index;
mod kcomplex;
mod lamf;
mod rem;
mod spindle;
mod swa;

pub use alpha::detect_alpha;
pub use blink::detect_blinks;
pub use emg::classify_emg_tone;
pub use index::{build_epoch_index, AlignmentError, EpochAnnotationIndex, EpochItem, KIND_COUNT};
pub use kcomplex::detect_kcomplexes;
pub use lamf::detect_lamf;
pub use rem::detect_rems;
pub use spindle::detect_spindles;
pub use swa::detect_swa;

/// Event vocabulary shared by detectors, rules, and files on disk.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    Alpha,
    Lamf,
    Spindle,
    Swa,
    Rem,
    KComplex,
    LowEmgTone,
    HighEmgTone,
    EyeBlink,
}

impl AnnotationKind {
    pub const ALL: [AnnotationKind; KIND_COUNT] = [
        AnnotationKind::Alpha,
        AnnotationKind::Lamf,
        AnnotationKind::Spindle,
        AnnotationKind::Swa,
        AnnotationKind::Rem,
        AnnotationKind::KComplex,
        AnnotationKind::LowEmgTone,
        AnnotationKind::HighEmgTone,
        AnnotationKind::EyeBlink,
    ];

    pub fn idx(self) -> usize {
        self as usize
    }

    /// Human-readable label for rendered output.
    pub fn label(self) -> &'static str {
        match self {
            AnnotationKind::Alpha => "alpha",
            AnnotationKind::Lamf => "LAMF",
            AnnotationKind::Spindle => "spindle",
            AnnotationKind::Swa => "SWA",
            AnnotationKind::Rem => "REM",
            AnnotationKind::KComplex => "K-complex",
            AnnotationKind::LowEmgTone => "low EMG tone",
            AnnotationKind::HighEmgTone => "high EMG tone",
            AnnotationKind::EyeBlink => "eye blink",
        }
    }
}

/// One detected event, in seconds from recording start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroAnnotation {
    pub kind: AnnotationKind,
    pub start_s: f64,
    pub end_s: f64,
    /// Role of the channel that produced the event.
    pub channel: Role,
    /// Detector-specific strength in [0, 1]; 1.0 where the detector has no
    /// graded notion of confidence.
    pub score: f64,
}

impl MicroAnnotation {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

#[derive(Debug, Error)]
#[error("{detector} detector failed on channel '{channel}': {source}")]
pub struct DetectorError {
    pub detector: &'static str,
    pub channel: String,
    #[source]
    pub source: DspError,
}

impl DetectorError {
    fn wrap(detector: &'static str, channel: &Channel) -> impl FnOnce(DspError) -> DetectorError {
        let channel = channel.label.clone();
        move |source| DetectorError { detector, channel, source }
    }
}

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error("no channel is bound for any of the {detector} roles {roles:?}")]
    MissingChannel { detector: &'static str, roles: Vec<Role> },
}

/// Run every enabled detector over the recording and collect the events,
/// unsorted. Channel selection is by preference order; the first bound role
/// wins. Alpha runs on the channel the night profile settled on.
pub fn annotate_recording(
    rec: &Recording,
    profile: &crate::profile::NightProfile,
    epochs: &[Epoch],
    cfg: &crate::config::EngineConfig,
) -> Result<Vec<MicroAnnotation>, AnnotateError> {
    let require = |detector: &'static str, roles: &[Role]| {
        rec.first_channel(roles).ok_or_else(|| AnnotateError::MissingChannel {
            detector,
            roles: roles.to_vec(),
        })
    };

    let mut out = Vec::new();

    let alpha_ch = require("alpha", &[profile.alpha_channel])?;
    out.extend(detect_alpha(alpha_ch, &cfg.alpha)?);

    let lamf_ch = require("LAMF", &cfg.lamf.channels)?;
    out.extend(detect_lamf(lamf_ch, &cfg.lamf)?);

    let spindle_ch = require("spindle", &cfg.spindle.channels)?;
    out.extend(detect_spindles(spindle_ch, &cfg.spindle)?);

    let swa_ch = require("SWA", &cfg.swa.channels)?;
    out.extend(detect_swa(swa_ch, &cfg.swa)?);

    let e1 = require("eye movement", &[Role::E1M2])?;
    let e2 = require("eye movement", &[Role::E2M1])?;
    out.extend(detect_rems(e1, e2, &cfg.rem)?);
    out.extend(detect_blinks(e1, e2, &cfg.blink)?);

    if cfg.kcomplex.enabled {
        let kc_ch = require("K-complex", &cfg.kcomplex.channels)?;
        out.extend(detect_kcomplexes(kc_ch, &cfg.kcomplex)?);
    }

    let chin = require("EMG tone", &[Role::ChinEMG])?;
    out.extend(classify_emg_tone(chin, &profile.emg_baseline, epochs, &cfg.emg));

    Ok(out)
}

/// Merge possibly-overlapping `(start, end)` intervals into a sorted
/// disjoint union. Touching intervals merge.
pub(crate) fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (s, e) in iv {
        match out.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => out.push((s, e)),
        }
    }
    out
}

/// Maximal runs where the mask holds, as half-open index ranges.
pub(crate) fn true_runs<I: IntoIterator<Item = bool>>(mask: I) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0usize;
    for v in mask {
        match (v, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
        i += 1;
    }
    if let Some(s) = start {
        out.push((s, i));
    }
    out
}

/// Indices where the signal's sign flips (zero counts as positive); each
/// index is the first sample of the new half-wave.
pub(crate) fn sign_changes(x: &[f64]) -> Vec<usize> {
    (1..x.len()).filter(|&i| (x[i] >= 0.0) != (x[i - 1] >= 0.0)).collect()
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::recording::{Channel, Role};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    pub fn noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect()
    }

    /// Add `amp · sin(2π f t + phase)` over `[t0, t1)`.
    pub fn add_tone(x: &mut [f64], fs: f64, f: f64, amp: f64, t0: f64, t1: f64, phase: f64) {
        let (i0, i1) = ((t0 * fs) as usize, ((t1 * fs) as usize).min(x.len()));
        for i in i0..i1 {
            x[i] += amp * (2.0 * std::f64::consts::PI * f * i as f64 / fs + phase).sin();
        }
    }

    pub fn chan(label: &str, role: Role, fs: f64, samples: Vec<f64>) -> Channel {
        let mut c = Channel::new(label, fs, samples);
        c.role = role;
        c
    }

}
