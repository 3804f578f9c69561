//! Deterministic SVG figures: the whole-night hypnogram (optionally
//! against a reference panel) and the single-epoch channel view with
//! annotation overlays. Pure string builders, so tests can count elements
//! and diff output byte for byte.

use std::fmt::Write as _;

use noctua_core::annotate::{AnnotationKind, MicroAnnotation};
use noctua_core::recording::Role;
use noctua_core::stage::StageLabel;
use noctua_core::EPOCH_SECONDS;
use noctua_evalkit::{Hypnogram, ScorerPanel};

pub fn kind_color(kind: AnnotationKind) -> &'static str {
    match kind {
        AnnotationKind::Alpha => "#1f77b4",
        AnnotationKind::Lamf => "#8c564b",
        AnnotationKind::Spindle => "#d62728",
        AnnotationKind::Swa => "#9467bd",
        AnnotationKind::Rem => "#2ca02c",
        AnnotationKind::KComplex => "#ff7f0e",
        AnnotationKind::LowEmgTone => "#17becf",
        AnnotationKind::HighEmgTone => "#bcbd22",
        AnnotationKind::EyeBlink => "#e377c2",
    }
}

fn kind_slug(kind: AnnotationKind) -> &'static str {
    match kind {
        AnnotationKind::Alpha => "alpha",
        AnnotationKind::Lamf => "lamf",
        AnnotationKind::Spindle => "spindle",
        AnnotationKind::Swa => "swa",
        AnnotationKind::Rem => "rem",
        AnnotationKind::KComplex => "k_complex",
        AnnotationKind::LowEmgTone => "low_emg_tone",
        AnnotationKind::HighEmgTone => "high_emg_tone",
        AnnotationKind::EyeBlink => "eye_blink",
    }
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Rows from top to bottom in the conventional clinical order.
fn stage_row(stage: StageLabel) -> usize {
    match stage {
        StageLabel::Wake => 0,
        StageLabel::R => 1,
        StageLabel::N1 => 2,
        StageLabel::N2 => 3,
        StageLabel::N3 => 4,
    }
}

const HYP_LEFT: f64 = 52.0;
const HYP_TOP: f64 = 22.0;
const HYP_PLOT_W: f64 = 1000.0;
const HYP_ROW_H: f64 = 36.0;
const HYP_PLOT_H: f64 = 5.0 * HYP_ROW_H;

fn staircase_path(stages: &[StageLabel], x: impl Fn(usize) -> f64) -> String {
    let y = |s: StageLabel| HYP_TOP + stage_row(s) as f64 * HYP_ROW_H + HYP_ROW_H / 2.0;
    let mut d = String::new();
    for (t, &s) in stages.iter().enumerate() {
        if t == 0 {
            let _ = write!(d, "M {:.2} {:.2}", x(0), y(s));
        } else {
            let _ = write!(d, " V {:.2}", y(s));
        }
        let _ = write!(d, " H {:.2}", x(t + 1));
    }
    d
}

/// Whole-night staircase. With a reference panel the figure adds the
/// consensus staircase underneath, per-epoch shading whose darkness grows
/// as scorer agreement drops, and one highlight rectangle per epoch where
/// the prediction departs from the consensus.
pub fn hypnogram_svg(predicted: &Hypnogram, reference: Option<&ScorerPanel>) -> String {
    let n = predicted.epoch_count().max(1);
    let x = |t: usize| HYP_LEFT + t as f64 * HYP_PLOT_W / n as f64;
    let width = HYP_LEFT + HYP_PLOT_W + 150.0;
    let height = HYP_TOP + HYP_PLOT_H + 46.0;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="#ffffff"/>"##
    );

    if let Some(panel) = reference {
        for (t, &ratio) in panel.agreement_ratio.iter().enumerate() {
            if ratio < 1.0 {
                let _ = writeln!(
                    s,
                    r##"<rect class="agreement" x="{:.2}" y="{HYP_TOP:.2}" width="{:.2}" height="{HYP_PLOT_H:.2}" fill="#46506e" fill-opacity="{:.3}"/>"##,
                    x(t),
                    x(t + 1) - x(t),
                    0.35 * (1.0 - ratio),
                );
            }
        }
    }

    // Grid and stage labels.
    for (row, label) in ["W", "R", "N1", "N2", "N3"].iter().enumerate() {
        let y = HYP_TOP + row as f64 * HYP_ROW_H + HYP_ROW_H / 2.0;
        let _ = writeln!(
            s,
            r##"<line x1="{HYP_LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            HYP_LEFT + HYP_PLOT_W
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            HYP_LEFT - 8.0,
            y + 4.0
        );
    }
    for k in 0..=4usize {
        let t = k * n / 4;
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#555555">{t}</text>"##,
            x(t),
            HYP_TOP + HYP_PLOT_H + 18.0
        );
    }
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#555555">epoch</text>"##,
        HYP_LEFT + HYP_PLOT_W / 2.0,
        HYP_TOP + HYP_PLOT_H + 36.0
    );

    if let Some(panel) = reference {
        let _ = writeln!(
            s,
            r##"<path class="consensus" d="{}" fill="none" stroke="#7aa6d8" stroke-width="3"/>"##,
            staircase_path(&panel.consensus.stages, x)
        );
    }
    let _ = writeln!(
        s,
        r##"<path class="prediction" d="{}" fill="none" stroke="#111111" stroke-width="1.8"/>"##,
        staircase_path(&predicted.stages, x)
    );

    if let Some(panel) = reference {
        for t in 0..n.min(panel.consensus.epoch_count()) {
            if predicted.stages[t] != panel.consensus.stages[t] {
                let _ = writeln!(
                    s,
                    r##"<rect class="disagreement" x="{:.2}" y="{HYP_TOP:.2}" width="{:.2}" height="{HYP_PLOT_H:.2}" fill="#d62728" fill-opacity="0.22"/>"##,
                    x(t),
                    x(t + 1) - x(t),
                );
            }
        }
        // Key for the overlay, to the right of the plot.
        let lx = HYP_LEFT + HYP_PLOT_W + 14.0;
        for (i, (color, label)) in [
            ("#111111", "prediction"),
            ("#7aa6d8", "consensus"),
            ("#d62728", "disagreement"),
            ("#46506e", "low agreement"),
        ]
        .iter()
        .enumerate()
        {
            let y = HYP_TOP + 10.0 + i as f64 * 20.0;
            let _ = writeln!(
                s,
                r#"<rect x="{lx:.2}" y="{y:.2}" width="12" height="12" fill="{color}"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
                lx + 18.0,
                y + 10.0
            );
        }
    }

    s.push_str("</svg>\n");
    s
}

/// One channel lane of the epoch view.
pub struct EpochLane<'a> {
    pub label: &'a str,
    pub role: Role,
    pub samples: &'a [f64],
}

const EP_LEFT: f64 = 92.0;
const EP_TOP: f64 = 54.0;
const EP_PLOT_W: f64 = 1080.0;
const EP_LANE_H: f64 = 64.0;
const EP_LANE_GAP: f64 = 10.0;

/// Per-pixel min/max envelope of a lane, as polyline points.
fn trace_points(samples: &[f64], y_mid: f64, gain: f64) -> String {
    let cols = EP_PLOT_W as usize;
    let n = samples.len();
    let mut pts = String::new();
    for col in 0..cols {
        let a = col * n / cols;
        let b = ((col + 1) * n / cols).max(a + 1).min(n);
        if a >= n {
            break;
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &samples[a..b] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let xpix = EP_LEFT + col as f64;
        let _ = write!(pts, "{xpix:.1},{:.1} {xpix:.1},{:.1} ", y_mid - hi * gain, y_mid - lo * gain);
    }
    pts
}

/// Single-epoch view: stacked channel traces, a colored translucent
/// rectangle per annotation on its channel's lane, and one legend entry
/// per annotation kind present.
pub fn epoch_svg(
    epoch_index: usize,
    epoch_start_s: f64,
    lanes: &[EpochLane<'_>],
    annotations: &[MicroAnnotation],
) -> String {
    let height = EP_TOP + lanes.len() as f64 * (EP_LANE_H + EP_LANE_GAP) + 30.0;
    let width = EP_LEFT + EP_PLOT_W + 24.0;
    let x_of = |t_s: f64| EP_LEFT + ((t_s - epoch_start_s) / EPOCH_SECONDS) * EP_PLOT_W;
    let lane_top = |i: usize| EP_TOP + i as f64 * (EP_LANE_H + EP_LANE_GAP);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="#ffffff"/>"##
    );
    let _ = writeln!(s, r#"<text x="{EP_LEFT:.2}" y="18">epoch {epoch_index}</text>"#);

    // Legend: one entry per kind present, in the fixed kind order.
    let mut kinds: Vec<AnnotationKind> =
        AnnotationKind::ALL.into_iter().filter(|k| annotations.iter().any(|a| a.kind == *k)).collect();
    kinds.dedup();
    for (i, kind) in kinds.iter().enumerate() {
        let lx = EP_LEFT + i as f64 * 118.0;
        let _ = writeln!(s, r#"<g class="legend-entry">"#);
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="28" width="12" height="12" fill="{}" fill-opacity="0.6"/>"#,
            kind_color(*kind)
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="38">{}</text>"#, lx + 16.0, esc(kind.label()));
        let _ = writeln!(s, "</g>");
    }

    // Annotation overlays under the traces.
    for a in annotations {
        let Some(lane_idx) = lanes.iter().position(|l| l.role == a.channel) else {
            continue;
        };
        let x0 = x_of(a.start_s.max(epoch_start_s));
        let x1 = x_of(a.end_s.min(epoch_start_s + EPOCH_SECONDS));
        let _ = writeln!(
            s,
            r#"<rect class="annotation {}" x="{x0:.2}" y="{:.2}" width="{:.2}" height="{EP_LANE_H:.2}" fill="{}" fill-opacity="0.28"/>"#,
            kind_slug(a.kind),
            lane_top(lane_idx),
            (x1 - x0).max(1.0),
            kind_color(a.kind),
        );
    }

    // Traces, each lane self-normalized.
    for (i, lane) in lanes.iter().enumerate() {
        let y_mid = lane_top(i) + EP_LANE_H / 2.0;
        let max_abs = lane.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let gain = (EP_LANE_H / 2.0 - 4.0) / max_abs.max(1e-9);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            EP_LEFT - 8.0,
            y_mid + 4.0,
            esc(lane.label)
        );
        let _ = writeln!(
            s,
            r##"<polyline class="trace" points="{}" fill="none" stroke="#222222" stroke-width="0.8"/>"##,
            trace_points(lane.samples, y_mid, gain)
        );
    }

    // Time axis in absolute seconds.
    let axis_y = lane_top(lanes.len()) + 4.0;
    for k in 0..=6 {
        let t = k as f64 * 5.0;
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{axis_y:.2}" text-anchor="middle" fill="#555555">{:.0}s</text>"##,
            x_of(epoch_start_s + t),
            epoch_start_s + t
        );
    }

    s.push_str("</svg>\n");
    s
}
