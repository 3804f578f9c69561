//! Planted waveforms. Each function adds samples in place over a window of
//! the channel buffer (LAMF rescales instead), quietly clipped to the
//! buffer; recipes are validated against epoch boundaries before this
//! layer runs. Frequencies are fixed at textbook centres of the bands the
//! detectors look in; amplitude and duration come from the event spec.

use std::f64::consts::PI;

/// The slow return of a sawtooth eye movement takes this many times the
/// rise; the full footprint is `rise * (1 + REM_FALL_RATIO)`.
pub const REM_FALL_RATIO: f64 = 2.5;

const SPINDLE_HZ: f64 = 13.0;
const SLOW_WAVE_HZ: f64 = 1.25;
const ALPHA_HZ: f64 = 10.0;
const ALPHA_RAMP_S: f64 = 0.25;
const BLINK_PERIOD_S: f64 = 1.0;
const BLINK_WIDTH_S: f64 = 0.5;
const LAMF_RIPPLE_HZ: f64 = 5.0;

/// Realized span of a slow-wave burst: whole cycles nearest the asked
/// duration, never fewer than one.
pub fn slow_wave_span(duration_s: f64) -> f64 {
    (duration_s * SLOW_WAVE_HZ).round().max(1.0) / SLOW_WAVE_HZ
}

/// Deflections in a blink train spanning `duration_s`: one every second
/// while a whole deflection still fits.
pub fn blink_count(duration_s: f64) -> usize {
    ((duration_s - BLINK_WIDTH_S) / BLINK_PERIOD_S).floor() as usize + 1
}

fn sample_span(fs: f64, t0: f64, dur: f64, len: usize) -> (usize, usize) {
    let a = ((t0 * fs).round().max(0.0) as usize).min(len);
    let b = (((t0 + dur) * fs).round().max(0.0) as usize).min(len);
    (a, b)
}

/// Hann-windowed sigma burst.
pub(crate) fn add_spindle(x: &mut [f64], fs: f64, t0: f64, amp: f64, dur: f64) {
    let (a, b) = sample_span(fs, t0, dur, x.len());
    for i in a..b {
        let t = i as f64 / fs - t0;
        let w = 0.5 * (1.0 - (2.0 * PI * t / dur).cos());
        x[i] += amp * w * (2.0 * PI * SPINDLE_HZ * t).sin();
    }
}

/// Whole delta cycles; returns the realized span.
pub(crate) fn add_slow_waves(x: &mut [f64], fs: f64, t0: f64, amp: f64, dur: f64) -> f64 {
    let span = slow_wave_span(dur);
    let (a, b) = sample_span(fs, t0, span, x.len());
    for i in a..b {
        let t = i as f64 / fs - t0;
        x[i] += amp * (2.0 * PI * SLOW_WAVE_HZ * t).sin();
    }
    span
}

/// Alpha burst with cosine on/off ramps so the edges do not splatter.
pub(crate) fn add_alpha(x: &mut [f64], fs: f64, t0: f64, amp: f64, dur: f64) {
    let ramp = ALPHA_RAMP_S.min(dur / 2.0);
    let (a, b) = sample_span(fs, t0, dur, x.len());
    for i in a..b {
        let t = i as f64 / fs - t0;
        let env = if t < ramp {
            0.5 * (1.0 - (PI * t / ramp).cos())
        } else if t > dur - ramp {
            0.5 * (1.0 - (PI * (dur - t) / ramp).cos())
        } else {
            1.0
        };
        x[i] += amp * env * (2.0 * PI * ALPHA_HZ * t).sin();
    }
}

/// Conjugate sawtooth: linear rise over `rise_s`, slow linear return.
/// Returns the full footprint.
pub(crate) fn add_rem(
    e1: &mut [f64],
    e2: &mut [f64],
    fs: f64,
    t0: f64,
    amp: f64,
    rise_s: f64,
) -> f64 {
    let fall = rise_s * REM_FALL_RATIO;
    let total = rise_s + fall;
    let (a, b) = sample_span(fs, t0, total, e1.len().min(e2.len()));
    for i in a..b {
        let t = i as f64 / fs - t0;
        let v = if t < rise_s { amp * t / rise_s } else { amp * (1.0 - (t - rise_s) / fall) };
        e1[i] += v;
        e2[i] -= v;
    }
    total
}

/// Train of biphasic deflections, conjugate across the EOG pair. Returns
/// the realized span (last deflection end minus onset).
pub(crate) fn add_blink_train(
    e1: &mut [f64],
    e2: &mut [f64],
    fs: f64,
    t0: f64,
    amp: f64,
    dur: f64,
) -> f64 {
    let count = blink_count(dur);
    for k in 0..count {
        let onset = t0 + k as f64 * BLINK_PERIOD_S;
        let (a, b) = sample_span(fs, onset, BLINK_WIDTH_S, e1.len().min(e2.len()));
        for i in a..b {
            let t = i as f64 / fs - onset;
            let v = amp * (2.0 * PI * t / BLINK_WIDTH_S).sin();
            e1[i] += v;
            e2[i] -= v;
        }
    }
    (count - 1) as f64 * BLINK_PERIOD_S + BLINK_WIDTH_S
}

/// Negative half-wave followed by a smaller rebound.
pub(crate) fn add_kcomplex(x: &mut [f64], fs: f64, t0: f64, amp: f64, dur: f64) {
    let trough = 0.45 * dur;
    let rebound = dur - trough;
    let (a, b) = sample_span(fs, t0, dur, x.len());
    for i in a..b {
        let t = i as f64 / fs - t0;
        x[i] += if t < trough {
            -amp * (PI * t / trough).sin()
        } else {
            0.8 * amp * (PI * (t - trough) / rebound).sin()
        };
    }
}

/// Damp whatever is in the window by `factor` and add a faint theta-range
/// ripple so the residual has mixed-frequency content rather than being
/// scaled-down background alone.
pub(crate) fn apply_lamf(x: &mut [f64], fs: f64, t0: f64, dur: f64, factor: f64) {
    let ripple = 30.0 * factor;
    let (a, b) = sample_span(fs, t0, dur, x.len());
    for i in a..b {
        let t = i as f64 / fs - t0;
        x[i] = x[i] * factor + ripple * (2.0 * PI * LAMF_RIPPLE_HZ * t).sin();
    }
}
