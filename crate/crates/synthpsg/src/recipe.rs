//! Night recipes: a declarative plan for a synthetic recording.
//!
//! A recipe is a seed, a background noise model, and an ordered list of
//! stage segments. Each segment covers a run of 30 s epochs and plants zero
//! or more event kinds into every epoch, either at fixed offsets or at
//! jittered non-overlapping slots.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use noctua_core::stage::StageLabel;
use noctua_core::EPOCH_SECONDS;

#[derive(Debug, Error)]
pub enum RecipeError {
    #[error("failed to read recipe {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid recipe {path}: {message}")]
    Parse { path: String, message: String },
    #[error("recipe has no segments")]
    EmptyPlan,
    #[error("invalid background: {0}")]
    Background(String),
    #[error("segment {segment}: {message}")]
    Segment { segment: usize, message: String },
}

/// Waveforms the generator can plant. Each maps to one annotation kind and
/// one destination channel; conjugate eye events write both EOG channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Hann-windowed 13 Hz burst on C4-M1.
    Spindle,
    /// Whole 1.25 Hz cycles on F4-M1; duration snaps to the cycle grid.
    SlowWave,
    /// Conjugate sawtooth on E1-M2/E2-M1; `duration` is the rise time and
    /// the slow return stretches another 2.5x.
    Rem,
    /// 10 Hz burst with cosine ramps on O2-M1.
    Alpha,
    /// Biphasic deflections at 1 s spacing on the EOG pair; `duration` is
    /// the train span.
    BlinkTrain,
    /// Sharp negative half-wave plus rebound on F4-M1.
    KComplex,
    /// Damps the C4-M1 background by `amplitude` (a factor in (0, 1)) and
    /// lays a faint 5 Hz ripple over the window.
    Lamf,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Spindle => "spindle",
            EventKind::SlowWave => "slow_wave",
            EventKind::Rem => "rem",
            EventKind::Alpha => "alpha",
            EventKind::BlinkTrain => "blink_train",
            EventKind::KComplex => "k_complex",
            EventKind::Lamf => "lamf",
        }
    }

    /// (amplitude, duration) used when the spec leaves them out. Amplitude
    /// is in microvolts except for `Lamf`, where it is the damping factor.
    pub fn defaults(self) -> (f64, f64) {
        match self {
            EventKind::Spindle => (60.0, 1.4),
            EventKind::SlowWave => (85.0, 8.0),
            EventKind::Rem => (150.0, 0.2),
            EventKind::Alpha => (60.0, 6.0),
            EventKind::BlinkTrain => (40.0, 4.0),
            EventKind::KComplex => (50.0, 0.9),
            EventKind::Lamf => (0.2, 10.0),
        }
    }
}

/// Chin EMG drive over a segment, as a multiple of the baseline sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmgLevel {
    Low,
    Medium,
    High,
}

impl EmgLevel {
    pub fn multiplier(self) -> f64 {
        match self {
            EmgLevel::Low => 0.3,
            EmgLevel::Medium => 1.0,
            EmgLevel::High => 3.0,
        }
    }

    /// Default drive when a segment does not say: atonia in R, a busy chin
    /// while awake, an in-between tone otherwise.
    pub fn for_stage(stage: StageLabel) -> EmgLevel {
        match stage {
            StageLabel::R => EmgLevel::Low,
            StageLabel::Wake => EmgLevel::High,
            _ => EmgLevel::Medium,
        }
    }
}

/// One planted event family within a segment. Give exactly one of
/// `per_epoch` (jittered slots) or `at` (fixed offsets, seconds from each
/// epoch start); either applies to every epoch of the segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpec {
    pub kind: EventKind,
    #[serde(default)]
    pub per_epoch: usize,
    #[serde(default)]
    pub at: Vec<f64>,
    /// Jittered placement stays inside this window within the epoch;
    /// defaults to half a second off either edge.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub duration: Option<f64>,
}

impl EventSpec {
    pub fn amplitude(&self) -> f64 {
        self.amplitude.unwrap_or(self.kind.defaults().0)
    }

    pub fn duration(&self) -> f64 {
        self.duration.unwrap_or(self.kind.defaults().1)
    }

    /// Seconds of signal the event occupies from its onset; this is what
    /// must fit inside the epoch, not the nominal duration.
    pub fn footprint_s(&self) -> f64 {
        let dur = self.duration();
        match self.kind {
            EventKind::Rem => dur * (1.0 + crate::templates::REM_FALL_RATIO),
            EventKind::SlowWave => crate::templates::slow_wave_span(dur),
            _ => dur,
        }
    }

    pub(crate) fn placement_window(&self) -> [f64; 2] {
        self.window.unwrap_or([0.5, EPOCH_SECONDS - 0.5])
    }
}

/// Stationary noise model under the planted events.
///
/// EEG channels run pink noise whose scale follows the segment stage:
/// `eeg_sigma_active` during N2/N3, `eeg_sigma_quiet` elsewhere (a segment
/// can override either). Keeping the sleep-dense part of the night louder
/// keeps night-relative detector baselines where planted events clear them
/// and bare noise does not, so recipes should keep N2+N3 the majority of
/// the night. EOG is pink at a fixed scale; chin EMG is white, scaled per
/// segment by its [`EmgLevel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundSpec {
    pub sample_rate: f64,
    pub eeg_sigma_active: f64,
    pub eeg_sigma_quiet: f64,
    pub eog_sigma: f64,
    pub emg_sigma: f64,
}

impl Default for BackgroundSpec {
    fn default() -> Self {
        BackgroundSpec {
            sample_rate: 128.0,
            eeg_sigma_active: 40.0,
            eeg_sigma_quiet: 28.0,
            eog_sigma: 10.0,
            emg_sigma: 6.0,
        }
    }
}

/// A run of identically staged epochs and the events planted into them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub stage: StageLabel,
    pub epochs: usize,
    #[serde(default)]
    pub emg: Option<EmgLevel>,
    #[serde(default)]
    pub eeg_sigma: Option<f64>,
    #[serde(default)]
    pub events: Vec<EventSpec>,
}

impl SegmentSpec {
    pub fn emg_level(&self) -> EmgLevel {
        self.emg.unwrap_or_else(|| EmgLevel::for_stage(self.stage))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NightRecipe {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub background: BackgroundSpec,
    pub segments: Vec<SegmentSpec>,
}

impl NightRecipe {
    /// Parse from TOML text, rejecting unknown keys.
    pub fn from_toml(text: &str) -> Result<Self, RecipeError> {
        let recipe: NightRecipe = toml::from_str(text)
            .map_err(|e| RecipeError::Parse { path: "<inline>".to_owned(), message: e.to_string() })?;
        recipe.validate()?;
        Ok(recipe)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, RecipeError> {
        let text = std::fs::read_to_string(path).map_err(|source| RecipeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let recipe: NightRecipe = toml::from_str(&text).map_err(|e| RecipeError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        recipe.validate()?;
        Ok(recipe)
    }

    pub fn total_epochs(&self) -> usize {
        self.segments.iter().map(|s| s.epochs).sum()
    }

    pub fn duration_s(&self) -> f64 {
        self.total_epochs() as f64 * EPOCH_SECONDS
    }

    pub fn validate(&self) -> Result<(), RecipeError> {
        if self.segments.is_empty() {
            return Err(RecipeError::EmptyPlan);
        }
        let bg = &self.background;
        if bg.sample_rate < 64.0 || bg.sample_rate.fract() != 0.0 {
            return Err(RecipeError::Background(format!(
                "sample_rate must be a whole number of at least 64 Hz, got {}",
                bg.sample_rate
            )));
        }
        for (name, v) in [
            ("eeg_sigma_active", bg.eeg_sigma_active),
            ("eeg_sigma_quiet", bg.eeg_sigma_quiet),
            ("eog_sigma", bg.eog_sigma),
            ("emg_sigma", bg.emg_sigma),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(RecipeError::Background(format!("{name} must be >= 0, got {v}")));
            }
        }

        for (i, seg) in self.segments.iter().enumerate() {
            let fail = |message: String| RecipeError::Segment { segment: i, message };
            if seg.epochs == 0 {
                return Err(fail("epochs must be at least 1".to_owned()));
            }
            if let Some(sigma) = seg.eeg_sigma {
                if !sigma.is_finite() || sigma < 0.0 {
                    return Err(fail(format!("eeg_sigma must be >= 0, got {sigma}")));
                }
            }
            for spec in &seg.events {
                validate_event(spec).map_err(|message| fail(message))?;
            }
        }
        Ok(())
    }
}

fn validate_event(spec: &EventSpec) -> Result<(), String> {
    let name = spec.kind.name();
    let fixed = !spec.at.is_empty();
    let jittered = spec.per_epoch > 0;
    if fixed == jittered {
        return Err(format!("event '{name}' needs exactly one of per_epoch or at"));
    }

    let amp = spec.amplitude();
    if spec.kind == EventKind::Lamf {
        if !(amp > 0.0 && amp < 1.0) {
            return Err(format!(
                "event 'lamf' amplitude is the damping factor and must lie in (0, 1), got {amp}"
            ));
        }
    } else if !(amp.is_finite() && amp > 0.0) {
        return Err(format!("event '{name}' amplitude must be positive, got {amp}"));
    }

    let dur = spec.duration();
    if !(dur.is_finite() && dur > 0.0) {
        return Err(format!("event '{name}' duration must be positive, got {dur}"));
    }
    if spec.kind == EventKind::BlinkTrain && dur < 2.5 {
        return Err(format!(
            "event 'blink_train' span must be at least 2.5 s for three deflections, got {dur}"
        ));
    }

    let footprint = spec.footprint_s();
    if footprint > EPOCH_SECONDS {
        return Err(format!(
            "event '{name}' occupies {footprint:.2} s, longer than one epoch"
        ));
    }

    if let Some([lo, hi]) = spec.window {
        if !(0.0 <= lo && lo < hi && hi <= EPOCH_SECONDS) {
            return Err(format!(
                "event '{name}' window [{lo}, {hi}] must satisfy 0 <= lo < hi <= {EPOCH_SECONDS}"
            ));
        }
    }

    if jittered {
        let [lo, hi] = spec.placement_window();
        let slot = (hi - lo) / spec.per_epoch as f64;
        if slot + 1e-9 < footprint {
            return Err(format!(
                "{} '{name}' events of {footprint:.2} s do not fit the {:.1} s window",
                spec.per_epoch,
                hi - lo
            ));
        }
    } else {
        for &off in &spec.at {
            if !(off >= 0.0 && off + footprint <= EPOCH_SECONDS + 1e-9) {
                return Err(format!(
                    "event '{name}' at {off} s runs past the epoch boundary \
                     ({footprint:.2} s footprint)"
                ));
            }
        }
    }
    Ok(())
}

/// Small self-contained plan used by the CLI demo and smoke tests: a
/// sleep-onset arc, a slow-wave block, a REM period, and a morning
/// awakening -- 48 epochs (24 minutes).
pub fn demo_recipe(seed: u64) -> NightRecipe {
    let quiet_wake = |epochs: usize| SegmentSpec {
        stage: StageLabel::Wake,
        epochs,
        emg: None,
        eeg_sigma: None,
        events: vec![
            EventSpec {
                kind: EventKind::Alpha,
                per_epoch: 3,
                at: vec![],
                window: None,
                amplitude: None,
                duration: None,
            },
            EventSpec {
                kind: EventKind::BlinkTrain,
                per_epoch: 0,
                at: vec![12.0],
                window: None,
                amplitude: None,
                duration: Some(3.5),
            },
        ],
    };
    let spindle_sleep = |epochs: usize| SegmentSpec {
        stage: StageLabel::N2,
        epochs,
        emg: None,
        eeg_sigma: None,
        events: vec![EventSpec {
            kind: EventKind::Spindle,
            per_epoch: 2,
            at: vec![],
            // Starts inside the first half of the epoch, so every N2 epoch
            // carries its own evidence.
            window: Some([0.5, 14.5]),
            amplitude: None,
            duration: None,
        }],
    };

    NightRecipe {
        seed,
        background: BackgroundSpec::default(),
        segments: vec![
            quiet_wake(6),
            SegmentSpec {
                stage: StageLabel::N1,
                epochs: 4,
                emg: None,
                eeg_sigma: None,
                events: vec![EventSpec {
                    kind: EventKind::Lamf,
                    per_epoch: 0,
                    at: vec![1.0],
                    window: None,
                    amplitude: None,
                    duration: Some(27.0),
                }],
            },
            spindle_sleep(14),
            SegmentSpec {
                stage: StageLabel::N3,
                epochs: 8,
                emg: None,
                eeg_sigma: None,
                events: vec![EventSpec {
                    kind: EventKind::SlowWave,
                    per_epoch: 0,
                    at: vec![3.0, 14.0],
                    window: None,
                    amplitude: None,
                    duration: None,
                }],
            },
            spindle_sleep(6),
            SegmentSpec {
                stage: StageLabel::R,
                epochs: 8,
                emg: None,
                eeg_sigma: None,
                events: vec![
                    EventSpec {
                        kind: EventKind::Lamf,
                        per_epoch: 0,
                        at: vec![0.2],
                        window: None,
                        amplitude: None,
                        duration: Some(29.5),
                    },
                    EventSpec {
                        kind: EventKind::Rem,
                        per_epoch: 3,
                        at: vec![],
                        window: Some([2.0, 28.0]),
                        amplitude: None,
                        duration: None,
                    },
                ],
            },
            quiet_wake(2),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_with_defaults() {
        let text = r#"
            seed = 7

            [background]
            eeg_sigma_quiet = 20.0

            [[segments]]
            stage = "N2"
            epochs = 5

            [[segments.events]]
            kind = "spindle"
            per_epoch = 2
            window = [0.5, 14.5]
        "#;
        let recipe = NightRecipe::from_toml(text).unwrap();
        assert_eq!(recipe.seed, 7);
        assert_eq!(recipe.background.sample_rate, 128.0);
        assert_eq!(recipe.background.eeg_sigma_quiet, 20.0);
        assert_eq!(recipe.total_epochs(), 5);
        let spec = &recipe.segments[0].events[0];
        assert_eq!(spec.kind, EventKind::Spindle);
        assert_eq!(spec.amplitude(), 60.0);
        assert_eq!(spec.duration(), 1.4);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
            [[segments]]
            stage = "N2"
            epochs = 5
            spindles = 2
        "#;
        assert!(matches!(
            NightRecipe::from_toml(text),
            Err(RecipeError::Parse { .. })
        ));
    }

    #[test]
    fn empty_plan_is_rejected() {
        let recipe = NightRecipe {
            seed: 0,
            background: BackgroundSpec::default(),
            segments: vec![],
        };
        assert!(matches!(recipe.validate(), Err(RecipeError::EmptyPlan)));
    }

    #[test]
    fn event_crossing_the_epoch_boundary_is_rejected() {
        let mut recipe = demo_recipe(1);
        recipe.segments[2].events[0] = EventSpec {
            kind: EventKind::Spindle,
            per_epoch: 0,
            at: vec![29.5],
            window: None,
            amplitude: None,
            duration: None, // 1.4 s footprint ends at 30.9 s
        };
        let err = recipe.validate().unwrap_err();
        assert!(matches!(err, RecipeError::Segment { segment: 2, .. }));
        assert!(err.to_string().contains("past the epoch boundary"), "{err}");
    }

    #[test]
    fn rem_footprint_includes_the_slow_return() {
        let spec = EventSpec {
            kind: EventKind::Rem,
            per_epoch: 0,
            at: vec![29.8],
            window: None,
            amplitude: None,
            duration: None, // 0.2 s rise + 0.5 s return
        };
        assert!((spec.footprint_s() - 0.7).abs() < 1e-12);
        assert!(validate_event(&spec).is_err());
    }

    #[test]
    fn placement_mode_must_be_unambiguous() {
        let mut both = EventSpec {
            kind: EventKind::Spindle,
            per_epoch: 2,
            at: vec![1.0],
            window: None,
            amplitude: None,
            duration: None,
        };
        assert!(validate_event(&both).is_err());
        both.per_epoch = 0;
        both.at.clear();
        assert!(validate_event(&both).is_err());
    }

    #[test]
    fn lamf_amplitude_is_a_factor() {
        let spec = EventSpec {
            kind: EventKind::Lamf,
            per_epoch: 0,
            at: vec![0.0],
            window: None,
            amplitude: Some(1.5),
            duration: Some(10.0),
        };
        let message = validate_event(&spec).unwrap_err();
        assert!(message.contains("damping factor"), "{message}");
    }

    #[test]
    fn crowded_window_is_rejected() {
        let spec = EventSpec {
            kind: EventKind::Alpha,
            per_epoch: 4,
            at: vec![],
            window: Some([0.0, 20.0]), // 4 slots of 5 s < 6 s bursts
            amplitude: None,
            duration: None,
        };
        assert!(validate_event(&spec).is_err());
    }

    #[test]
    fn demo_recipe_is_valid() {
        demo_recipe(42).validate().unwrap();
    }
}
