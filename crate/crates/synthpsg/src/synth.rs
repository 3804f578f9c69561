//! Renders a recipe into a six-channel recording plus the ground truth of
//! everything planted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use noctua_core::annotate::{AnnotationKind, MicroAnnotation};
use noctua_core::recording::{Channel, Recording, Role};
use noctua_core::stage::StageLabel;
use noctua_core::EPOCH_SECONDS;

use crate::noise;
use crate::recipe::{EmgLevel, EventKind, EventSpec, NightRecipe, RecipeError};
use crate::templates;

/// What the generator planted: the intended stage per epoch and every
/// event as the annotation a perfect detector would emit, sorted by onset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub hypnogram: Vec<StageLabel>,
    pub annotations: Vec<MicroAnnotation>,
}

const F4: usize = 0;
const C4: usize = 1;
const O2: usize = 2;
const E1: usize = 3;
const E2: usize = 4;
const EMG: usize = 5;

const CHANNELS: [(&str, Role); 6] = [
    ("F4-M1", Role::F4M1),
    ("C4-M1", Role::C4M1),
    ("O2-M1", Role::O2M1),
    ("E1-M2", Role::E1M2),
    ("E2-M1", Role::E2M1),
    ("Chin EMG", Role::ChinEMG),
];

/// Stream offset for the placement RNG, past the per-channel streams.
const PLACEMENT_STREAM: u64 = 1_000;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Left edges for `n` events jittered inside `window`, one per equal slot,
/// so events from one spec never overlap. Always draws exactly `n`
/// uniforms, keeping the RNG stream alignment independent of the values.
fn jitter_offsets(rng: &mut impl Rng, n: usize, window: [f64; 2], footprint: f64) -> Vec<f64> {
    let slot = (window[1] - window[0]) / n as f64;
    (0..n)
        .map(|i| {
            let u: f64 = rng.gen();
            window[0] + i as f64 * slot + u * (slot - footprint).max(0.0)
        })
        .collect()
}

fn is_active(stage: StageLabel) -> bool {
    matches!(stage, StageLabel::N2 | StageLabel::N3)
}

pub fn synthesize(recipe: &NightRecipe) -> Result<(Recording, GroundTruth), RecipeError> {
    recipe.validate()?;
    let bg = &recipe.background;
    let fs = bg.sample_rate;
    let epoch_len = (EPOCH_SECONDS * fs).round() as usize;
    let total_epochs = recipe.total_epochs();
    let n = total_epochs * epoch_len;

    // Per-epoch plan tables.
    let mut stage_of = Vec::with_capacity(total_epochs);
    let mut sigma_of = Vec::with_capacity(total_epochs);
    let mut emg_of = Vec::with_capacity(total_epochs);
    for seg in &recipe.segments {
        let sigma = seg.eeg_sigma.unwrap_or(if is_active(seg.stage) {
            bg.eeg_sigma_active
        } else {
            bg.eeg_sigma_quiet
        });
        for _ in 0..seg.epochs {
            stage_of.push(seg.stage);
            sigma_of.push(sigma);
            emg_of.push(seg.emg_level());
        }
    }

    // Backgrounds, one RNG stream per channel so planting order never
    // disturbs the noise.
    let mut bufs: Vec<Vec<f64>> = Vec::with_capacity(CHANNELS.len());
    for k in 0..CHANNELS.len() {
        let mut rng = stream_rng(recipe.seed, k as u64);
        let buf = if k == EMG {
            let mut v = noise::white(&mut rng, n, bg.emg_sigma);
            for (e, &level) in emg_of.iter().enumerate() {
                let m = level.multiplier();
                for x in &mut v[e * epoch_len..(e + 1) * epoch_len] {
                    *x *= m;
                }
            }
            v
        } else if k == E1 || k == E2 {
            let mut v = noise::pink_unit(&mut rng, n, fs);
            for x in &mut v {
                *x *= bg.eog_sigma;
            }
            v
        } else {
            let mut v = noise::pink_unit(&mut rng, n, fs);
            for (e, &sigma) in sigma_of.iter().enumerate() {
                for x in &mut v[e * epoch_len..(e + 1) * epoch_len] {
                    *x *= sigma;
                }
            }
            v
        };
        bufs.push(buf);
    }

    // Events. The placement RNG is consumed in plan order (segment, epoch,
    // spec, slot), which the recipe alone determines.
    let mut placer = stream_rng(recipe.seed, PLACEMENT_STREAM);
    let mut truth: Vec<MicroAnnotation> = Vec::new();
    let mut first_epoch = 0usize;
    for seg in &recipe.segments {
        for e in 0..seg.epochs {
            let epoch_start = (first_epoch + e) as f64 * EPOCH_SECONDS;
            for spec in &seg.events {
                let offsets = if spec.at.is_empty() {
                    jitter_offsets(
                        &mut placer,
                        spec.per_epoch,
                        spec.placement_window(),
                        spec.footprint_s(),
                    )
                } else {
                    spec.at.clone()
                };
                for off in offsets {
                    truth.push(plant(&mut bufs, fs, spec, epoch_start + off));
                }
            }
        }
        first_epoch += seg.epochs;
    }

    // Chin-tone truth for the epochs whose EMG drive is extreme.
    for (e, &level) in emg_of.iter().enumerate() {
        let kind = match level {
            EmgLevel::Low => AnnotationKind::LowEmgTone,
            EmgLevel::High => AnnotationKind::HighEmgTone,
            EmgLevel::Medium => continue,
        };
        truth.push(MicroAnnotation {
            kind,
            start_s: e as f64 * EPOCH_SECONDS,
            end_s: (e + 1) as f64 * EPOCH_SECONDS,
            channel: Role::ChinEMG,
            score: 1.0,
        });
    }

    truth.sort_by(|a, b| {
        a.start_s
            .partial_cmp(&b.start_s)
            .unwrap()
            .then(a.kind.idx().cmp(&b.kind.idx()))
            .then(a.end_s.partial_cmp(&b.end_s).unwrap())
    });

    let channels = CHANNELS
        .iter()
        .zip(bufs)
        .map(|(&(label, role), samples)| {
            let mut ch = Channel::new(label, fs, samples);
            ch.role = role;
            ch
        })
        .collect();
    let recording = Recording::new(channels, total_epochs as f64 * EPOCH_SECONDS);

    Ok((recording, GroundTruth { hypnogram: stage_of, annotations: truth }))
}

/// Write one event into the buffers and return its truth annotation.
fn plant(bufs: &mut [Vec<f64>], fs: f64, spec: &EventSpec, t0: f64) -> MicroAnnotation {
    let amp = spec.amplitude();
    let dur = spec.duration();
    let (kind, channel, end_s) = match spec.kind {
        EventKind::Spindle => {
            templates::add_spindle(&mut bufs[C4], fs, t0, amp, dur);
            (AnnotationKind::Spindle, Role::C4M1, t0 + dur)
        }
        EventKind::SlowWave => {
            let span = templates::add_slow_waves(&mut bufs[F4], fs, t0, amp, dur);
            (AnnotationKind::Swa, Role::F4M1, t0 + span)
        }
        EventKind::Rem => {
            let (head, tail) = bufs.split_at_mut(E2);
            templates::add_rem(&mut head[E1], &mut tail[0], fs, t0, amp, dur);
            // The detector keys on the sharp rise, not the slow return.
            (AnnotationKind::Rem, Role::E1M2, t0 + dur)
        }
        EventKind::Alpha => {
            templates::add_alpha(&mut bufs[O2], fs, t0, amp, dur);
            (AnnotationKind::Alpha, Role::O2M1, t0 + dur)
        }
        EventKind::BlinkTrain => {
            let (head, tail) = bufs.split_at_mut(E2);
            let span = templates::add_blink_train(&mut head[E1], &mut tail[0], fs, t0, amp, dur);
            (AnnotationKind::EyeBlink, Role::E1M2, t0 + span)
        }
        EventKind::KComplex => {
            templates::add_kcomplex(&mut bufs[F4], fs, t0, amp, dur);
            (AnnotationKind::KComplex, Role::F4M1, t0 + dur)
        }
        EventKind::Lamf => {
            templates::apply_lamf(&mut bufs[C4], fs, t0, dur, amp);
            (AnnotationKind::Lamf, Role::C4M1, t0 + dur)
        }
    };
    MicroAnnotation { kind, start_s: t0, end_s, channel, score: 1.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recipe::{demo_recipe, BackgroundSpec, SegmentSpec};
    use noctua_core::edf::{parse_edf, write_edf};
    use noctua_core::recording::{map_roles, RoleMap};

    fn silent_background() -> BackgroundSpec {
        BackgroundSpec {
            sample_rate: 128.0,
            eeg_sigma_active: 0.0,
            eeg_sigma_quiet: 0.0,
            eog_sigma: 0.0,
            emg_sigma: 0.0,
        }
    }

    fn one_segment(stage: StageLabel, epochs: usize, events: Vec<EventSpec>) -> NightRecipe {
        NightRecipe {
            seed: 5,
            background: silent_background(),
            segments: vec![SegmentSpec { stage, epochs, emg: None, eeg_sigma: None, events }],
        }
    }

    fn spec(kind: EventKind) -> EventSpec {
        EventSpec { kind, per_epoch: 0, at: vec![], window: None, amplitude: None, duration: None }
    }

    #[test]
    fn bookkeeping_matches_the_plan() {
        let recipe = one_segment(
            StageLabel::N2,
            10,
            vec![EventSpec { per_epoch: 2, window: Some([0.5, 14.5]), ..spec(EventKind::Spindle) }],
        );
        let (rec, truth) = synthesize(&recipe).unwrap();

        assert_eq!(rec.channels.len(), 6);
        assert_eq!(rec.duration_s, 300.0);
        assert_eq!(truth.hypnogram, vec![StageLabel::N2; 10]);

        let spindles: Vec<_> =
            truth.annotations.iter().filter(|a| a.kind == AnnotationKind::Spindle).collect();
        assert_eq!(spindles.len(), 20);
        for (e, pair) in spindles.chunks(2).enumerate() {
            let lo = e as f64 * 30.0;
            for a in pair {
                assert!(a.start_s >= lo + 0.5 && a.end_s <= lo + 14.5 + 1.4 + 1e-9);
                assert_eq!(a.channel, Role::C4M1);
            }
            assert!(pair[0].end_s <= pair[1].start_s + 1e-9, "slots overlap");
        }
    }

    #[test]
    fn same_seed_is_bit_identical_and_seeds_matter() {
        let recipe = demo_recipe(42);
        let (rec_a, truth_a) = synthesize(&recipe).unwrap();
        let (rec_b, truth_b) = synthesize(&recipe).unwrap();
        for (a, b) in rec_a.channels.iter().zip(&rec_b.channels) {
            assert_eq!(a.samples, b.samples, "channel {}", a.label);
        }
        assert_eq!(truth_a, truth_b);
        assert_eq!(write_edf(&rec_a).unwrap(), write_edf(&rec_b).unwrap());

        let (rec_c, _) = synthesize(&demo_recipe(43)).unwrap();
        assert_ne!(rec_a.channels[C4].samples, rec_c.channels[C4].samples);
    }

    #[test]
    fn silent_slow_wave_has_the_advertised_swing() {
        let recipe = one_segment(
            StageLabel::N3,
            1,
            vec![EventSpec { at: vec![3.0], ..spec(EventKind::SlowWave) }],
        );
        let (rec, truth) = synthesize(&recipe).unwrap();
        let f4 = &rec.channels[F4].samples;
        let max = f4.iter().cloned().fold(f64::MIN, f64::max);
        let min = f4.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max > 84.5 && max <= 85.0 + 1e-9, "max {max}");
        assert!(min < -84.5 && min >= -85.0 - 1e-9, "min {min}");

        let swa = &truth.annotations[0];
        assert_eq!(swa.kind, AnnotationKind::Swa);
        assert!((swa.end_s - swa.start_s - 8.0).abs() < 1e-12, "whole cycles");
        // Quiet outside the planted span.
        let before = &f4[..(3.0 * 128.0) as usize];
        assert!(before.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn silent_rem_is_conjugate() {
        let recipe =
            one_segment(StageLabel::R, 1, vec![EventSpec { at: vec![5.0], ..spec(EventKind::Rem) }]);
        let (rec, truth) = synthesize(&recipe).unwrap();
        let e1 = &rec.channels[E1].samples;
        let e2 = &rec.channels[E2].samples;
        for (a, b) in e1.iter().zip(e2) {
            assert_eq!(*a, -*b);
        }
        let peak = e1.iter().cloned().fold(f64::MIN, f64::max);
        assert!(peak > 145.0 && peak <= 150.0, "peak {peak}");
        // Truth covers the rise only.
        let rem = truth.annotations.iter().find(|a| a.kind == AnnotationKind::Rem).unwrap();
        assert!((rem.end_s - rem.start_s - 0.2).abs() < 1e-12);
    }

    #[test]
    fn silent_lamf_leaves_only_the_ripple() {
        let recipe = one_segment(
            StageLabel::N1,
            1,
            vec![EventSpec { at: vec![10.0], duration: Some(5.0), ..spec(EventKind::Lamf) }],
        );
        let (rec, _) = synthesize(&recipe).unwrap();
        let c4 = &rec.channels[C4].samples;
        let inside = &c4[(10.0 * 128.0) as usize..(15.0 * 128.0) as usize];
        let peak = inside.iter().cloned().fold(f64::MIN, f64::max);
        assert!(peak > 5.8 && peak <= 6.0, "ripple peak {peak}");
        assert!(c4[..(10.0 * 128.0) as usize].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn emg_levels_scale_the_chin_channel() {
        let recipe = NightRecipe {
            seed: 9,
            background: BackgroundSpec::default(),
            segments: vec![
                SegmentSpec {
                    stage: StageLabel::Wake,
                    epochs: 2,
                    emg: None,
                    eeg_sigma: None,
                    events: vec![],
                },
                SegmentSpec {
                    stage: StageLabel::N2,
                    epochs: 2,
                    emg: None,
                    eeg_sigma: None,
                    events: vec![],
                },
                SegmentSpec {
                    stage: StageLabel::R,
                    epochs: 2,
                    emg: None,
                    eeg_sigma: None,
                    events: vec![],
                },
            ],
        };
        let (rec, truth) = synthesize(&recipe).unwrap();
        let emg = &rec.channels[EMG].samples;
        let rms = |lo: usize, hi: usize| {
            let w = &emg[lo * 3840..hi * 3840];
            (w.iter().map(|v| v * v).sum::<f64>() / w.len() as f64).sqrt()
        };
        let (wake, n2, rem) = (rms(0, 2), rms(2, 4), rms(4, 6));
        assert!((wake / n2 - 3.0).abs() < 0.3, "wake/n2 {}", wake / n2);
        assert!((rem / n2 - 0.3).abs() < 0.05, "rem/n2 {}", rem / n2);

        // Tone truth marks the extremes only.
        let tones: Vec<_> = truth
            .annotations
            .iter()
            .filter(|a| {
                matches!(a.kind, AnnotationKind::LowEmgTone | AnnotationKind::HighEmgTone)
            })
            .collect();
        assert_eq!(tones.len(), 4);
        assert!(tones[..2].iter().all(|a| a.kind == AnnotationKind::HighEmgTone));
        assert!(tones[2..].iter().all(|a| a.kind == AnnotationKind::LowEmgTone));
    }

    #[test]
    fn annotations_come_out_sorted() {
        let (_, truth) = synthesize(&demo_recipe(3)).unwrap();
        assert!(truth.annotations.windows(2).all(|w| w[0].start_s <= w[1].start_s));
        assert!(!truth.annotations.is_empty());
    }

    #[test]
    fn edf_round_trip_binds_all_roles() {
        let (rec, _) = synthesize(&demo_recipe(21)).unwrap();
        let bytes = write_edf(&rec).unwrap();
        let mut parsed = parse_edf(&bytes).unwrap();
        map_roles(&mut parsed, &RoleMap::default()).unwrap();
        for (_, role) in CHANNELS {
            assert!(
                parsed.channels.iter().any(|c| c.role == role),
                "role {role} not bound after round trip"
            );
        }
        // Calibration keeps samples within half a quantization step.
        let step = (8191.75 - -8192.0) / 65535.0;
        for (a, b) in rec.channels[F4].samples.iter().zip(&parsed.channels[F4].samples) {
            assert!((a - b).abs() <= step / 2.0 + 1e-9);
        }
    }

    proptest::proptest! {
        #[test]
        fn jittered_slots_stay_inside_and_apart(
            seed in 0u64..1_000,
            n in 1usize..6,
            dur in 0.3f64..2.0,
        ) {
            let window = [0.5, 29.5];
            let mut rng = stream_rng(seed, PLACEMENT_STREAM);
            let offs = jitter_offsets(&mut rng, n, window, dur);
            let slot = (window[1] - window[0]) / n as f64;
            proptest::prop_assume!(slot >= dur);
            for (i, &off) in offs.iter().enumerate() {
                proptest::prop_assert!(off >= window[0] - 1e-9);
                proptest::prop_assert!(off + dur <= window[1] + 1e-9);
                if i > 0 {
                    proptest::prop_assert!(off >= offs[i - 1] + dur - 1e-9);
                }
            }
        }
    }
}
