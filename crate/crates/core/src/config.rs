//! Engine configuration: channel role patterns, detector thresholds, and
//! rule-engine thresholds.
//!
//! Everything has a documented default; a config file (TOML) can override
//! any subset. Unknown keys are rejected so typos fail loudly instead of
//! silently running with defaults.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsp::Band;
use crate::recording::{Role, RoleMap};
use crate::stage::StageLabel;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config value: {0}")]
    Invalid(String),
}

/// Alpha-rhythm scan: sliding Welch windows on the occipital channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlphaConfig {
    pub window_s: f64,
    pub step_s: f64,
    pub band: Band<f64>,
    /// A window qualifies when the band's relative power reaches this value.
    pub min_relative_power: f64,
}

impl Default for AlphaConfig {
    fn default() -> Self {
        AlphaConfig {
            window_s: 2.0,
            step_s: 0.5,
            band: Band::new(8.0, 12.0),
            min_relative_power: 0.5,
        }
    }
}

/// Low-amplitude mixed-frequency activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LamfConfig {
    pub band: Band<f64>,
    pub min_run_s: f64,
    pub min_relative_power: f64,
    /// θ = mean(|x|) − std_coefficient · std(|x|).
    pub std_coefficient: f64,
    /// Channel preference order; the first bound role is used.
    pub channels: Vec<Role>,
}

impl Default for LamfConfig {
    fn default() -> Self {
        LamfConfig {
            band: Band::new(4.0, 7.0),
            min_run_s: 1.0,
            min_relative_power: 0.01,
            std_coefficient: 0.01,
            channels: vec![Role::C4M1, Role::C3M2, Role::F4M1, Role::F3M2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpindleConfig {
    pub band: Band<f64>,
    pub rms_window_s: f64,
    /// Envelope threshold as a multiple of the channel's median envelope.
    pub median_factor: f64,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    pub channels: Vec<Role>,
}

impl Default for SpindleConfig {
    fn default() -> Self {
        SpindleConfig {
            band: Band::new(11.0, 16.0),
            rms_window_s: 0.25,
            median_factor: 2.0,
            min_duration_s: 0.5,
            max_duration_s: 2.0,
            channels: vec![Role::C4M1, Role::C3M2, Role::F4M1, Role::F3M2],
        }
    }
}

/// Slow wave activity (half-wave pair analysis on the filtered signal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwaConfig {
    pub band: Band<f64>,
    pub min_peak_to_peak_uv: f64,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    pub channels: Vec<Role>,
}

impl Default for SwaConfig {
    fn default() -> Self {
        SwaConfig {
            band: Band::new(0.5, 2.0),
            min_peak_to_peak_uv: 75.0,
            min_duration_s: 0.5,
            max_duration_s: 2.0,
            channels: vec![Role::F4M1, Role::F3M2, Role::C4M1, Role::C3M2],
        }
    }
}

/// Rapid eye movements: conjugate out-of-phase steep deflections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RemConfig {
    pub band: Band<f64>,
    pub min_slope_uv_per_s: f64,
    pub min_sustain_s: f64,
    /// The initial deflection must complete within this time.
    pub max_deflection_s: f64,
}

impl Default for RemConfig {
    fn default() -> Self {
        RemConfig {
            band: Band::new(0.3, 10.0),
            min_slope_uv_per_s: 500.0,
            min_sustain_s: 0.04,
            max_deflection_s: 0.5,
        }
    }
}

/// K-complex detection is off by default; its evidence only participates in
/// the rules when enabled here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KComplexConfig {
    pub enabled: bool,
    pub band: Band<f64>,
    pub min_negative_peak_uv: f64,
    pub rebound_within_s: f64,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    pub min_peak_to_peak_uv: f64,
    pub channels: Vec<Role>,
}

impl Default for KComplexConfig {
    fn default() -> Self {
        KComplexConfig {
            enabled: false,
            band: Band::new(0.3, 4.0),
            min_negative_peak_uv: 40.0,
            rebound_within_s: 1.0,
            min_duration_s: 0.5,
            max_duration_s: 1.5,
            min_peak_to_peak_uv: 75.0,
            channels: vec![Role::F4M1, Role::F3M2, Role::C4M1, Role::C3M2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlinkConfig {
    pub band: Band<f64>,
    /// Deflection repetition interval bounds (0.5–2 Hz rate).
    pub min_interval_s: f64,
    pub max_interval_s: f64,
    pub min_deflections: usize,
    pub min_peak_to_peak_uv: f64,
}

impl Default for BlinkConfig {
    fn default() -> Self {
        BlinkConfig {
            band: Band::new(0.5, 5.0),
            min_interval_s: 0.5,
            max_interval_s: 2.0,
            min_deflections: 3,
            min_peak_to_peak_uv: 50.0,
        }
    }
}

/// Chin-tone classification against the night-level envelope percentiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmgConfig {
    pub rms_window_s: f64,
    /// Low tone: epoch median envelope ≤ low_factor · p10 (inclusive).
    pub low_factor: f64,
}

impl Default for EmgConfig {
    fn default() -> Self {
        EmgConfig { rms_window_s: 0.5, low_factor: 1.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileConfig {
    /// Union of qualifying alpha windows needed to call the recording an
    /// alpha generator.
    pub alpha_evidence_min_s: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig { alpha_evidence_min_s: 60.0 }
    }
}

/// Rule-engine thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StagerConfig {
    /// Definite N3 needs SWA coverage strictly above this.
    pub swa_min_coverage: f64,
    /// Definite W needs alpha/blink union coverage strictly above this.
    pub wake_min_coverage: f64,
    /// Definite R needs LAMF coverage strictly above this.
    pub r_min_coverage: f64,
    /// Definite N1 needs LAMF coverage at or above this.
    pub n1_lamf_min: f64,
    /// Length of the "first half / last half" windows of the N2 rule.
    pub n2_half_window_s: f64,
    /// Whether K-complex evidence participates in the rules. The pipeline
    /// keeps this in lockstep with `[kcomplex].enabled`.
    pub kcomplex_enabled: bool,
    /// Stage assigned to epoch 0 when no rule fires and there is no
    /// predecessor to inherit from.
    pub first_epoch_default: StageLabel,
}

impl Default for StagerConfig {
    fn default() -> Self {
        StagerConfig {
            swa_min_coverage: 0.20,
            wake_min_coverage: 0.50,
            r_min_coverage: 0.50,
            n1_lamf_min: 0.50,
            n2_half_window_s: 15.0,
            kcomplex_enabled: false,
            first_epoch_default: StageLabel::Wake,
        }
    }
}

/// Full engine configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    pub roles: RoleMap,
    pub alpha: AlphaConfig,
    pub lamf: LamfConfig,
    pub spindle: SpindleConfig,
    pub swa: SwaConfig,
    pub rem: RemConfig,
    pub kcomplex: KComplexConfig,
    pub blink: BlinkConfig,
    pub emg: EmgConfig,
    pub profile: ProfileConfig,
    pub stager: StagerConfig,
}

impl EngineConfig {
    /// Stager view with the K-complex toggle synchronized to the detector
    /// section, which is the single user-facing switch.
    pub fn stager_for_run(&self) -> StagerConfig {
        let mut s = self.stager.clone();
        s.kcomplex_enabled = self.kcomplex.enabled;
        s
    }

    /// Parse from TOML text, rejecting unknown keys.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: EngineConfig = toml::from_str(text)
            .map_err(|e| ConfigError::Parse { path: "<inline>".to_owned(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: EngineConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cheap sanity checks that catch sign/typo mistakes before a long run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let coverage = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        coverage("stager.swa_min_coverage", self.stager.swa_min_coverage)?;
        coverage("stager.wake_min_coverage", self.stager.wake_min_coverage)?;
        coverage("stager.r_min_coverage", self.stager.r_min_coverage)?;
        coverage("stager.n1_lamf_min", self.stager.n1_lamf_min)?;
        coverage("alpha.min_relative_power", self.alpha.min_relative_power)?;
        coverage("lamf.min_relative_power", self.lamf.min_relative_power)?;

        let band = |name: &str, b: Band<f64>| {
            if b.lo > 0.0 && b.lo < b.hi {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!(
                    "{name} band [{}, {}] must satisfy 0 < lo < hi",
                    b.lo, b.hi
                )))
            }
        };
        band("alpha", self.alpha.band)?;
        band("lamf", self.lamf.band)?;
        band("spindle", self.spindle.band)?;
        band("swa", self.swa.band)?;
        band("rem", self.rem.band)?;
        band("kcomplex", self.kcomplex.band)?;
        band("blink", self.blink.band)?;

        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")))
            }
        };
        positive("alpha.window_s", self.alpha.window_s)?;
        positive("alpha.step_s", self.alpha.step_s)?;
        positive("lamf.min_run_s", self.lamf.min_run_s)?;
        positive("spindle.rms_window_s", self.spindle.rms_window_s)?;
        positive("emg.rms_window_s", self.emg.rms_window_s)?;
        positive("stager.n2_half_window_s", self.stager.n2_half_window_s)?;
        positive("profile.alpha_evidence_min_s", self.profile.alpha_evidence_min_s)?;

        if self.blink.min_deflections == 0 {
            return Err(ConfigError::Invalid("blink.min_deflections must be at least 1".into()));
        }
        if self.blink.min_interval_s > self.blink.max_interval_s {
            return Err(ConfigError::Invalid(
                "blink interval bounds are inverted".into(),
            ));
        }
        if self.lamf.channels.is_empty() {
            return Err(ConfigError::Invalid("lamf.channels must not be empty".into()));
        }
        if self.spindle.channels.is_empty() {
            return Err(ConfigError::Invalid("spindle.channels must not be empty".into()));
        }
        if self.swa.channels.is_empty() {
            return Err(ConfigError::Invalid("swa.channels must not be empty".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        EngineConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_toml_overrides_one_field() {
        let cfg = EngineConfig::from_toml(
            r#"
            [stager]
            swa_min_coverage = 0.25

            [spindle]
            median_factor = 2.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.stager.swa_min_coverage, 0.25);
        assert_eq!(cfg.spindle.median_factor, 2.0);
        // Untouched sections keep their defaults.
        assert_eq!(cfg.stager.wake_min_coverage, 0.50);
        assert_eq!(cfg.alpha.band, Band::new(8.0, 12.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = EngineConfig::from_toml(
            r#"
            [stager]
            swa_min_coverge = 0.25
            "#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }), "{err}");
    }

    #[test]
    fn out_of_range_coverage_is_rejected() {
        let err = EngineConfig::from_toml(
            r#"
            [stager]
            wake_min_coverage = 1.5
            "#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)), "{err}");
    }

    #[test]
    fn kcomplex_toggle_propagates_to_the_stager_view() {
        let cfg = EngineConfig::from_toml("[kcomplex]\nenabled = true\n").unwrap();
        assert!(!cfg.stager.kcomplex_enabled);
        assert!(cfg.stager_for_run().kcomplex_enabled);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = EngineConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = EngineConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }
}
