//! End-to-end check: a synthesized demo night, run through the real
//! detectors and the rule engine, comes back staged as planned.

use noctua_core::annotate::{annotate_recording, build_epoch_index, AnnotationKind};
use noctua_core::config::EngineConfig;
use noctua_core::profile::build_night_profile;
use noctua_core::recording::segment_epochs;
use noctua_core::stage::stage_recording;
use noctua_synthpsg::{demo_recipe, synthesize};

#[test]
fn demo_night_round_trips_through_the_pipeline() {
    let recipe = demo_recipe(2024);
    let (rec, truth) = synthesize(&recipe).unwrap();
    let cfg = EngineConfig::default();

    let profile = build_night_profile(&rec, &cfg).unwrap();
    assert!(profile.generates_alpha_rhythm, "planted alpha should dominate the survey");

    let epochs = segment_epochs(&rec).unwrap();
    let annotations = annotate_recording(&rec, &profile, &epochs, &cfg).unwrap();

    // Planted spindles should be found nearly one for one.
    let planted: Vec<_> =
        truth.annotations.iter().filter(|a| a.kind == AnnotationKind::Spindle).collect();
    let hits = planted
        .iter()
        .filter(|t| {
            annotations.iter().any(|d| {
                d.kind == AnnotationKind::Spindle && d.start_s < t.end_s && d.end_s > t.start_s
            })
        })
        .count();
    assert!(
        hits * 100 >= planted.len() * 95,
        "spindle recall {hits}/{}",
        planted.len()
    );

    let index = build_epoch_index(annotations, &epochs, rec.duration_s).unwrap();
    let staged = stage_recording(&index, &profile, &cfg.stager_for_run());

    let got: Vec<_> = staged.iter().map(|s| s.stage).collect();
    let misses: Vec<_> = got
        .iter()
        .zip(&truth.hypnogram)
        .enumerate()
        .filter(|(_, (g, t))| g != t)
        .map(|(i, (g, t))| format!("epoch {i}: planned {t} staged {g}"))
        .collect();
    assert!(misses.is_empty(), "{}", misses.join("; "));
}
