//! Recording model: channels, montage roles, epoch segmentation, and the
//! signal-quality integrity report.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Sample, EPOCH_SECONDS};

/// Montage role a channel can be bound to. `Other` is the unbound default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    F4M1,
    F3M2,
    C4M1,
    C3M2,
    O2M1,
    O1M2,
    E1M2,
    E2M1,
    ChinEMG,
    Other,
}

impl Role {
    /// Every bindable role, in binding-priority order.
    pub const BINDABLE: [Role; 9] = [
        Role::F4M1,
        Role::F3M2,
        Role::C4M1,
        Role::C3M2,
        Role::O2M1,
        Role::O1M2,
        Role::E1M2,
        Role::E2M1,
        Role::ChinEMG,
    ];
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Role::F4M1 => "F4M1",
            Role::F3M2 => "F3M2",
            Role::C4M1 => "C4M1",
            Role::C3M2 => "C3M2",
            Role::O2M1 => "O2M1",
            Role::O1M2 => "O1M2",
            Role::E1M2 => "E1M2",
            Role::E2M1 => "E2M1",
            Role::ChinEMG => "ChinEMG",
            Role::Other => "Other",
        };
        f.write_str(s)
    }
}

/// One channel of a recording, samples already in physical units
/// (microvolts for every role this pipeline consumes).
#[derive(Debug, Clone)]
pub struct Channel {
    pub label: String,
    pub role: Role,
    pub sample_rate: f64,
    pub samples: Vec<Sample>,
    pub physical_dim: String,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub transducer: String,
    pub prefiltering: String,
}

impl Channel {
    /// Bare channel with a symmetric default calibration range; used by the
    /// synthesizer and by tests that do not care about header fields.
    pub fn new(label: impl Into<String>, sample_rate: f64, samples: Vec<Sample>) -> Self {
        Channel {
            label: label.into(),
            role: Role::Other,
            sample_rate,
            samples,
            physical_dim: "uV".to_owned(),
            physical_min: -8192.0,
            physical_max: 8191.75,
            digital_min: -32768,
            digital_max: 32767,
            transducer: String::new(),
            prefiltering: String::new(),
        }
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Sample index range covering `[start_s, end_s)`, clamped to the data.
    pub fn sample_range(&self, start_s: f64, end_s: f64) -> std::ops::Range<usize> {
        let lo = (start_s * self.sample_rate).round().max(0.0) as usize;
        let hi = (end_s * self.sample_rate).round() as usize;
        lo.min(self.samples.len())..hi.min(self.samples.len())
    }
}

/// A parsed recording: all signal channels plus the recording-level header
/// strings that survive a round trip.
#[derive(Debug, Clone)]
pub struct Recording {
    pub channels: Vec<Channel>,
    /// Total signal duration in seconds (records × record duration).
    pub duration_s: f64,
    pub patient_id: String,
    pub recording_id: String,
    pub start_date: String,
    pub start_time: String,
}

impl Recording {
    pub fn new(channels: Vec<Channel>, duration_s: f64) -> Self {
        Recording {
            channels,
            duration_s,
            patient_id: "X X X X".to_owned(),
            recording_id: "Startdate X X X X".to_owned(),
            start_date: "01.01.85".to_owned(),
            start_time: "00.00.00".to_owned(),
        }
    }

    /// First channel bound to `role`, if any.
    pub fn channel(&self, role: Role) -> Option<&Channel> {
        self.channels.iter().find(|c| c.role == role)
    }

    /// First bound channel among `roles`, in preference order.
    pub fn first_channel(&self, roles: &[Role]) -> Option<&Channel> {
        roles.iter().find_map(|r| self.channel(*r))
    }

    pub fn epoch_count(&self) -> usize {
        (self.duration_s / EPOCH_SECONDS).floor() as usize
    }
}

/// One 30-second scoring epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    pub index: usize,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Debug, Error)]
pub enum EpochError {
    #[error("recording too short: {duration_s} s does not cover one {epoch_s} s epoch")]
    TooShort { duration_s: f64, epoch_s: f64 },
}

/// Cut the recording into whole 30 s epochs; a trailing partial epoch is
/// dropped. Fails if the recording does not cover even one epoch.
pub fn segment_epochs(recording: &Recording) -> Result<Vec<Epoch>, EpochError> {
    let count = recording.epoch_count();
    if count == 0 {
        return Err(EpochError::TooShort {
            duration_s: recording.duration_s,
            epoch_s: EPOCH_SECONDS,
        });
    }
    Ok((0..count)
        .map(|index| Epoch {
            index,
            start_s: index as f64 * EPOCH_SECONDS,
            end_s: (index + 1) as f64 * EPOCH_SECONDS,
        })
        .collect())
}

/// Label patterns per role; see [`map_roles`] for the matching rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoleMap {
    pub f4m1: Vec<String>,
    pub f3m2: Vec<String>,
    pub c4m1: Vec<String>,
    pub c3m2: Vec<String>,
    pub o2m1: Vec<String>,
    pub o1m2: Vec<String>,
    pub e1m2: Vec<String>,
    pub e2m1: Vec<String>,
    pub chin_emg: Vec<String>,
}

impl Default for RoleMap {
    fn default() -> Self {
        let v = |s: &[&str]| s.iter().map(|p| (*p).to_owned()).collect();
        RoleMap {
            f4m1: v(&["f4-m1", "f4m1", "f4-a1"]),
            f3m2: v(&["f3-m2", "f3m2", "f3-a2"]),
            c4m1: v(&["c4-m1", "c4m1", "c4-a1"]),
            c3m2: v(&["c3-m2", "c3m2", "c3-a2"]),
            o2m1: v(&["o2-m1", "o2m1", "o2-a1"]),
            o1m2: v(&["o1-m2", "o1m2", "o1-a2"]),
            e1m2: v(&["e1-m2", "e1m2", "eogl", "eog left", "loc"]),
            e2m1: v(&["e2-m1", "e2m1", "eogr", "eog right", "roc"]),
            chin_emg: v(&["chin", "emg"]),
        }
    }
}

impl RoleMap {
    fn patterns(&self, role: Role) -> &[String] {
        match role {
            Role::F4M1 => &self.f4m1,
            Role::F3M2 => &self.f3m2,
            Role::C4M1 => &self.c4m1,
            Role::C3M2 => &self.c3m2,
            Role::O2M1 => &self.o2m1,
            Role::O1M2 => &self.o1m2,
            Role::E1M2 => &self.e1m2,
            Role::E2M1 => &self.e2m1,
            Role::ChinEMG => &self.chin_emg,
            Role::Other => &[],
        }
    }
}

#[derive(Debug, Error)]
pub enum RoleError {
    #[error("roles {first} and {second} both resolve to channel '{label}'")]
    Ambiguous { first: Role, second: Role, label: String },
}

fn normalize_label(label: &str) -> String {
    label.chars().filter(|c| !c.is_whitespace()).flat_map(char::to_lowercase).collect()
}

/// Bind montage roles to channels by label.
///
/// Matching is case-insensitive and whitespace-normalized substring search;
/// for each role the patterns are tried in order and the first matching
/// channel (in file order) wins. Unresolved roles are not an error here —
/// they surface in [`check_integrity`]'s `missing_roles` and requiredness is
/// the pipeline's call. Two roles landing on the same channel is ambiguous.
pub fn map_roles(recording: &mut Recording, map: &RoleMap) -> Result<(), RoleError> {
    let normalized: Vec<String> =
        recording.channels.iter().map(|c| normalize_label(&c.label)).collect();
    let mut bound: Vec<(usize, Role)> = Vec::new();
    for role in Role::BINDABLE {
        let hit = map.patterns(role).iter().find_map(|pat| {
            let pat = normalize_label(pat);
            normalized.iter().position(|label| label.contains(&pat))
        });
        if let Some(idx) = hit {
            if let Some((_, prior)) = bound.iter().find(|(i, _)| *i == idx) {
                return Err(RoleError::Ambiguous {
                    first: *prior,
                    second: role,
                    label: recording.channels[idx].label.clone(),
                });
            }
            bound.push((idx, role));
        }
    }
    for ch in &mut recording.channels {
        ch.role = Role::Other;
    }
    for (idx, role) in bound {
        recording.channels[idx].role = role;
    }
    Ok(())
}

/// Peak-to-peak threshold below which a one-second window counts as flat.
pub const FLATLINE_PEAK_TO_PEAK_UV: f64 = 0.1;

/// Per-channel signal-quality figures. Advisory only; nothing downstream
/// refuses to run because of them.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelIntegrity {
    pub label: String,
    pub role: Role,
    /// Fraction of whole one-second windows with peak-to-peak < 0.1 µV.
    pub flatline_fraction: f64,
    /// Fraction of samples exactly at the declared physical bounds.
    pub clipped_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrityReport {
    /// Bindable roles that did not resolve to any channel.
    pub missing_roles: Vec<Role>,
    pub channels: Vec<ChannelIntegrity>,
}

/// Survey the recording for flatlined windows, clipped samples, and
/// unresolved roles. Never fails.
pub fn check_integrity(recording: &Recording) -> IntegrityReport {
    let missing_roles = Role::BINDABLE
        .into_iter()
        .filter(|r| recording.channel(*r).is_none())
        .collect();

    let channels = recording
        .channels
        .iter()
        .map(|ch| {
            let win = (ch.sample_rate.round() as usize).max(1);
            let mut flat = 0usize;
            let mut windows = 0usize;
            for chunk in ch.samples.chunks_exact(win) {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &s in chunk {
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
                if hi - lo < FLATLINE_PEAK_TO_PEAK_UV {
                    flat += 1;
                }
                windows += 1;
            }
            let clipped = ch
                .samples
                .iter()
                .filter(|&&s| s == ch.physical_min || s == ch.physical_max)
                .count();
            ChannelIntegrity {
                label: ch.label.clone(),
                role: ch.role,
                flatline_fraction: if windows == 0 { 0.0 } else { flat as f64 / windows as f64 },
                clipped_fraction: if ch.samples.is_empty() {
                    0.0
                } else {
                    clipped as f64 / ch.samples.len() as f64
                },
            }
        })
        .collect();

    IntegrityReport { missing_roles, channels }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec_with_labels(labels: &[&str]) -> Recording {
        let channels = labels
            .iter()
            .map(|l| Channel::new(*l, 100.0, vec![0.0; 3000]))
            .collect();
        Recording::new(channels, 30.0)
    }

    #[test]
    fn ten_minutes_make_twenty_epochs() {
        let rec = Recording::new(vec![Channel::new("C4-M1", 10.0, vec![0.0; 6000])], 600.0);
        let epochs = segment_epochs(&rec).unwrap();
        assert_eq!(epochs.len(), 20);
        assert_eq!(epochs[0].start_s, 0.0);
        assert_eq!(epochs[19].end_s, 600.0);
    }

    #[test]
    fn trailing_partial_epoch_is_dropped() {
        let rec = Recording::new(vec![], 65.0);
        assert_eq!(segment_epochs(&rec).unwrap().len(), 2);
    }

    #[test]
    fn sub_epoch_recording_is_too_short() {
        let rec = Recording::new(vec![], 29.0);
        assert!(matches!(segment_epochs(&rec), Err(EpochError::TooShort { .. })));
    }

    #[test]
    fn roles_bind_case_and_whitespace_insensitively() {
        let mut rec = rec_with_labels(&["EEG F4-M1", "eeg C4-m1", "EOG E1-M2", "Chin 1-Chin 2"]);
        map_roles(&mut rec, &RoleMap::default()).unwrap();
        assert_eq!(rec.channels[0].role, Role::F4M1);
        assert_eq!(rec.channels[1].role, Role::C4M1);
        assert_eq!(rec.channels[2].role, Role::E1M2);
        assert_eq!(rec.channels[3].role, Role::ChinEMG);
    }

    #[test]
    fn first_of_duplicate_labels_wins() {
        let mut rec = rec_with_labels(&["C4-M1", "C4-M1 bis"]);
        map_roles(&mut rec, &RoleMap::default()).unwrap();
        assert_eq!(rec.channels[0].role, Role::C4M1);
        assert_eq!(rec.channels[1].role, Role::Other);
    }

    #[test]
    fn two_roles_on_one_channel_is_ambiguous() {
        let mut rec = rec_with_labels(&["mystery"]);
        let mut map = RoleMap::default();
        map.c4m1.push("mystery".to_owned());
        map.o2m1.push("mystery".to_owned());
        let err = map_roles(&mut rec, &map).unwrap_err();
        let RoleError::Ambiguous { first, second, label } = err;
        assert_eq!((first, second), (Role::C4M1, Role::O2M1));
        assert_eq!(label, "mystery");
    }

    #[test]
    fn integrity_flags_flat_and_clipped_channels() {
        let fs = 100.0;
        let n = 3000;
        // Flat first half, 10 Hz sine second half.
        let half_flat: Vec<f64> = (0..n)
            .map(|i| {
                if i < n / 2 {
                    0.0
                } else {
                    50.0 * (std::f64::consts::TAU * 10.0 * i as f64 / fs).sin()
                }
            })
            .collect();
        // Square wave pinned at the declared physical maximum half the time.
        let mut clipped_ch = Channel::new("sq", fs, Vec::new());
        clipped_ch.physical_min = -100.0;
        clipped_ch.physical_max = 100.0;
        clipped_ch.samples = (0..n).map(|i| if i % 10 < 5 { 100.0 } else { 0.0 }).collect();

        let mut rec = Recording::new(
            vec![Channel::new("halfflat", fs, half_flat), clipped_ch],
            30.0,
        );
        map_roles(&mut rec, &RoleMap::default()).unwrap();
        let report = check_integrity(&rec);

        assert!((report.channels[0].flatline_fraction - 0.5).abs() <= 0.05);
        assert_eq!(report.channels[0].clipped_fraction, 0.0);
        assert!((report.channels[1].clipped_fraction - 0.5).abs() <= 1e-12);
        // Nothing matched any role pattern.
        assert_eq!(report.missing_roles.len(), Role::BINDABLE.len());
    }
}
