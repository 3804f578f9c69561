//! EDF (European Data Format) reader and writer.
//!
//! Classic EDF only: a 256-byte fixed header, one 256-byte header block per
//! signal (stored field-major), then interleaved data records of 16-bit
//! little-endian two's-complement samples. EDF+ annotation channels are
//! recognized by label and dropped after their bytes are consumed, so the
//! record layout stays aligned.
//!
//! Calibration maps the digital span onto the physical span linearly; the
//! declared extremes map *exactly* onto each other so that clipping
//! detection downstream can test `sample == physical_max` without epsilon.
//! The writer uses the same convention in reverse, so a write→parse round
//! trip moves no sample by more than half a quantization step.

use thiserror::Error;

use crate::recording::{Channel, Recording, Role};

#[derive(Debug, Error)]
pub enum EdfError {
    /// A header field failed to parse; `offset` is the byte position of the
    /// offending field in the file.
    #[error("EDF parse error at byte {offset}: {what}")]
    Parse { offset: usize, what: String },
    /// The file ends before the layout declared in its header.
    #[error("EDF file truncated: expected {expected} bytes, got {got}")]
    Truncation { expected: usize, got: usize },
    /// Structurally valid but carries no signal data.
    #[error("EDF recording contains no signal data")]
    EmptyRecording,
}

const HEADER_LEN: usize = 256;
const ANNOTATION_LABEL: &str = "EDF Annotations";

fn ascii_field(bytes: &[u8], offset: usize, len: usize) -> Result<&str, EdfError> {
    let raw = &bytes[offset..offset + len];
    std::str::from_utf8(raw)
        .map(str::trim)
        .map_err(|_| EdfError::Parse { offset, what: "field is not ASCII text".to_owned() })
}

fn int_field(bytes: &[u8], offset: usize, len: usize, what: &str) -> Result<i64, EdfError> {
    let s = ascii_field(bytes, offset, len)?;
    s.parse::<i64>().map_err(|_| EdfError::Parse {
        offset,
        what: format!("{what}: expected an integer, got {s:?}"),
    })
}

fn float_field(bytes: &[u8], offset: usize, len: usize, what: &str) -> Result<f64, EdfError> {
    let s = ascii_field(bytes, offset, len)?;
    let v: f64 = s.parse().map_err(|_| EdfError::Parse {
        offset,
        what: format!("{what}: expected a number, got {s:?}"),
    })?;
    if !v.is_finite() {
        return Err(EdfError::Parse { offset, what: format!("{what}: {s:?} is not finite") });
    }
    Ok(v)
}

struct SignalHeader {
    label: String,
    transducer: String,
    physical_dim: String,
    physical_min: f64,
    physical_max: f64,
    digital_min: i32,
    digital_max: i32,
    prefiltering: String,
    samples_per_record: usize,
}

/// Parse an EDF file from memory.
pub fn parse_edf(bytes: &[u8]) -> Result<Recording, EdfError> {
    if bytes.len() < HEADER_LEN {
        return Err(EdfError::Truncation { expected: HEADER_LEN, got: bytes.len() });
    }

    let patient_id = ascii_field(bytes, 8, 80)?.to_owned();
    let recording_id = ascii_field(bytes, 88, 80)?.to_owned();
    let start_date = ascii_field(bytes, 168, 8)?.to_owned();
    let start_time = ascii_field(bytes, 176, 8)?.to_owned();
    let declared_records = int_field(bytes, 236, 8, "number of data records")?;
    let record_duration = float_field(bytes, 244, 8, "data record duration")?;
    let num_signals = int_field(bytes, 252, 4, "number of signals")?;

    if num_signals == 0 {
        return Err(EdfError::EmptyRecording);
    }
    if num_signals < 0 {
        return Err(EdfError::Parse {
            offset: 252,
            what: format!("number of signals is negative ({num_signals})"),
        });
    }
    if record_duration <= 0.0 {
        return Err(EdfError::Parse {
            offset: 244,
            what: format!("data record duration must be positive, got {record_duration}"),
        });
    }
    let ns = num_signals as usize;

    let header_end = HEADER_LEN + ns * 256;
    if bytes.len() < header_end {
        return Err(EdfError::Truncation { expected: header_end, got: bytes.len() });
    }

    // Signal header blocks are field-major: all labels, all transducers, ...
    let block = |field_offset: usize, width: usize, i: usize| {
        HEADER_LEN + field_offset * ns + i * width
    };
    let mut headers = Vec::with_capacity(ns);
    for i in 0..ns {
        let physical_min = float_field(bytes, block(104, 8, i), 8, "physical minimum")?;
        let physical_max = float_field(bytes, block(112, 8, i), 8, "physical maximum")?;
        if physical_min >= physical_max {
            return Err(EdfError::Parse {
                offset: block(112, 8, i),
                what: format!(
                    "physical range is empty ({physical_min} .. {physical_max})"
                ),
            });
        }
        let digital_min = int_field(bytes, block(120, 8, i), 8, "digital minimum")?;
        let digital_max = int_field(bytes, block(128, 8, i), 8, "digital maximum")?;
        if digital_min == digital_max {
            return Err(EdfError::Parse {
                offset: block(128, 8, i),
                what: "digital range has zero span".to_owned(),
            });
        }
        let spr_offset = block(216, 8, i);
        let samples_per_record = int_field(bytes, spr_offset, 8, "samples per record")?;
        if samples_per_record <= 0 {
            return Err(EdfError::Parse {
                offset: spr_offset,
                what: format!("samples per record must be positive, got {samples_per_record}"),
            });
        }
        headers.push(SignalHeader {
            label: ascii_field(bytes, block(0, 16, i), 16)?.to_owned(),
            transducer: ascii_field(bytes, block(16, 80, i), 80)?.to_owned(),
            physical_dim: ascii_field(bytes, block(96, 8, i), 8)?.to_owned(),
            physical_min,
            physical_max,
            digital_min: digital_min as i32,
            digital_max: digital_max as i32,
            prefiltering: ascii_field(bytes, block(136, 80, i), 80)?.to_owned(),
            samples_per_record: samples_per_record as usize,
        });
    }

    let samples_per_full_record: usize = headers.iter().map(|h| h.samples_per_record).sum();
    let record_bytes = samples_per_full_record * 2;

    let num_records = if declared_records >= 0 {
        declared_records as usize
    } else {
        // Unknown record count (live-recorded files): derive from length.
        (bytes.len() - header_end) / record_bytes.max(1)
    };
    if num_records == 0 {
        return Err(EdfError::EmptyRecording);
    }

    let expected = header_end + num_records * record_bytes;
    if bytes.len() < expected {
        return Err(EdfError::Truncation { expected, got: bytes.len() });
    }

    let mut samples: Vec<Vec<f64>> = headers
        .iter()
        .map(|h| Vec::with_capacity(h.samples_per_record * num_records))
        .collect();
    for r in 0..num_records {
        let mut cursor = header_end + r * record_bytes;
        for (i, h) in headers.iter().enumerate() {
            let dmin = h.digital_min;
            let dmax = h.digital_max;
            let drange = (dmax - dmin) as f64;
            let prange = h.physical_max - h.physical_min;
            let out = &mut samples[i];
            for _ in 0..h.samples_per_record {
                let d = i16::from_le_bytes([bytes[cursor], bytes[cursor + 1]]) as i32;
                cursor += 2;
                // Endpoints map exactly onto the declared physical bounds.
                let v = if d == dmin {
                    h.physical_min
                } else if d == dmax {
                    h.physical_max
                } else {
                    (d - dmin) as f64 * prange / drange + h.physical_min
                };
                out.push(v);
            }
        }
    }

    let mut channels = Vec::with_capacity(ns);
    for (h, data) in headers.into_iter().zip(samples) {
        if h.label == ANNOTATION_LABEL {
            continue;
        }
        channels.push(Channel {
            label: h.label,
            role: Role::Other,
            sample_rate: h.samples_per_record as f64 / record_duration,
            samples: data,
            physical_dim: h.physical_dim,
            physical_min: h.physical_min,
            physical_max: h.physical_max,
            digital_min: h.digital_min,
            digital_max: h.digital_max,
            transducer: h.transducer,
            prefiltering: h.prefiltering,
        });
    }
    if channels.is_empty() {
        return Err(EdfError::EmptyRecording);
    }

    Ok(Recording {
        channels,
        duration_s: num_records as f64 * record_duration,
        patient_id,
        recording_id,
        start_date,
        start_time,
    })
}

/// Data record length used by the writer. One-second records divide every
/// integer sample rate, which is all this pipeline produces.
pub const RECORD_SECONDS: f64 = 1.0;

#[derive(Debug, Error)]
pub enum EdfWriteError {
    #[error("recording has no channels or no samples")]
    EmptyRecording,
    #[error("channel '{label}': sample {value} outside the calibration range {min}..{max}")]
    Calibration { label: String, value: f64, min: f64, max: f64 },
    #[error("channel '{label}': {what}")]
    Layout { label: String, what: String },
    #[error("header field {what} does not fit its slot: {value:?}")]
    FieldOverflow { what: &'static str, value: String },
}

/// Render a calibration bound into an 8-character EDF numeric field,
/// dropping precision only if the shortest form does not fit.
fn num_field(v: f64) -> String {
    let mut s =
        if v == v.trunc() && v.abs() < 1e7 { format!("{v:.0}") } else { format!("{v}") };
    let mut precision = 6;
    while s.len() > 8 && precision > 0 {
        precision -= 1;
        s = format!("{v:.precision$}");
    }
    s
}

/// Serialize a recording as classic EDF with one-second data records.
///
/// Every channel's sample rate must be a positive integer and all channels
/// must cover the same whole number of records. Samples outside a channel's
/// declared physical range do not fit the digital span and are an error
/// rather than silently clipped.
pub fn write_edf(rec: &Recording) -> Result<Vec<u8>, EdfWriteError> {
    if rec.channels.is_empty() || rec.channels.iter().all(|c| c.samples.is_empty()) {
        return Err(EdfWriteError::EmptyRecording);
    }

    let mut sprs = Vec::with_capacity(rec.channels.len());
    let mut num_records = None;
    for ch in &rec.channels {
        let layout = |what: String| EdfWriteError::Layout { label: ch.label.clone(), what };
        let spr = ch.sample_rate * RECORD_SECONDS;
        if !(spr.is_finite() && spr >= 1.0 && spr.fract() == 0.0) {
            return Err(layout(format!(
                "sample rate {} does not yield whole samples per {RECORD_SECONDS} s record",
                ch.sample_rate
            )));
        }
        let spr = spr as usize;
        if ch.samples.is_empty() || ch.samples.len() % spr != 0 {
            return Err(layout(format!(
                "{} samples do not divide into {spr}-sample records",
                ch.samples.len()
            )));
        }
        if ch.digital_min >= ch.digital_max
            || ch.digital_min < i16::MIN as i32
            || ch.digital_max > i16::MAX as i32
        {
            return Err(layout(format!(
                "digital range {}..{} is not a valid 16-bit span",
                ch.digital_min, ch.digital_max
            )));
        }
        let records = ch.samples.len() / spr;
        match num_records {
            None => num_records = Some(records),
            Some(r) if r != records => {
                return Err(layout(format!(
                    "covers {records} records but the first channel covers {r}"
                )));
            }
            Some(_) => {}
        }
        sprs.push(spr);
    }
    let num_records = num_records.unwrap();
    let ns = rec.channels.len();

    let mut out = Vec::new();
    let mut push = |what: &'static str, s: String, width: usize| {
        if s.len() > width || !s.is_ascii() {
            return Err(EdfWriteError::FieldOverflow { what, value: s });
        }
        let mut b = s.into_bytes();
        b.resize(width, b' ');
        out.extend_from_slice(&b);
        Ok(())
    };

    push("version", "0".to_owned(), 8)?;
    push("patient id", rec.patient_id.clone(), 80)?;
    push("recording id", rec.recording_id.clone(), 80)?;
    push("start date", rec.start_date.clone(), 8)?;
    push("start time", rec.start_time.clone(), 8)?;
    push("header bytes", format!("{}", 256 * (ns + 1)), 8)?;
    push("reserved", String::new(), 44)?;
    push("record count", format!("{num_records}"), 8)?;
    push("record duration", num_field(RECORD_SECONDS), 8)?;
    push("signal count", format!("{ns}"), 4)?;

    for ch in &rec.channels {
        push("label", ch.label.clone(), 16)?;
    }
    for ch in &rec.channels {
        push("transducer", ch.transducer.clone(), 80)?;
    }
    for ch in &rec.channels {
        push("physical dimension", ch.physical_dim.clone(), 8)?;
    }
    for ch in &rec.channels {
        push("physical minimum", num_field(ch.physical_min), 8)?;
    }
    for ch in &rec.channels {
        push("physical maximum", num_field(ch.physical_max), 8)?;
    }
    for ch in &rec.channels {
        push("digital minimum", format!("{}", ch.digital_min), 8)?;
    }
    for ch in &rec.channels {
        push("digital maximum", format!("{}", ch.digital_max), 8)?;
    }
    for ch in &rec.channels {
        push("prefiltering", ch.prefiltering.clone(), 80)?;
    }
    for &spr in &sprs {
        push("samples per record", format!("{spr}"), 8)?;
    }
    for _ in &rec.channels {
        push("reserved", String::new(), 32)?;
    }
    drop(push);

    for r in 0..num_records {
        for (ch, &spr) in rec.channels.iter().zip(&sprs) {
            let dmin = ch.digital_min;
            let dmax = ch.digital_max;
            let scale = (dmax - dmin) as f64 / (ch.physical_max - ch.physical_min);
            for &v in &ch.samples[r * spr..(r + 1) * spr] {
                if !v.is_finite() || v < ch.physical_min || v > ch.physical_max {
                    return Err(EdfWriteError::Calibration {
                        label: ch.label.clone(),
                        value: v,
                        min: ch.physical_min,
                        max: ch.physical_max,
                    });
                }
                let d = (dmin as f64 + (v - ch.physical_min) * scale).round() as i32;
                let d = d.clamp(dmin, dmax) as i16;
                out.extend_from_slice(&d.to_le_bytes());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Sig {
        label: &'static str,
        phys: (f64, f64),
        dig: (i32, i32),
        spr: usize,
        /// Digital samples per record, cycled.
        data: Vec<i16>,
    }

    /// Hand-rolled EDF builder, deliberately independent of the production
    /// writer in the synthesizer module.
    fn build(signals: &[Sig], num_records: i64, record_dur: f64) -> Vec<u8> {
        let ns = signals.len();
        let mut out = Vec::new();
        let mut push = |s: String, w: usize| {
            let mut b = s.into_bytes();
            assert!(b.len() <= w, "field overflow");
            b.resize(w, b' ');
            out.extend_from_slice(&b);
        };
        push("0".into(), 8);
        push("patient".into(), 80);
        push("recording".into(), 80);
        push("02.03.04".into(), 8);
        push("10.20.30".into(), 8);
        push(format!("{}", 256 * (ns + 1)), 8);
        push(String::new(), 44);
        push(format!("{num_records}"), 8);
        push(format!("{record_dur}"), 8);
        push(format!("{ns}"), 4);
        for s in signals {
            push(s.label.into(), 16);
        }
        for _ in signals {
            push("transducer".into(), 80);
        }
        for _ in signals {
            push("uV".into(), 8);
        }
        for s in signals {
            push(format!("{}", s.phys.0), 8);
        }
        for s in signals {
            push(format!("{}", s.phys.1), 8);
        }
        for s in signals {
            push(format!("{}", s.dig.0), 8);
        }
        for s in signals {
            push(format!("{}", s.dig.1), 8);
        }
        for _ in signals {
            push(String::new(), 80);
        }
        for s in signals {
            push(format!("{}", s.spr), 8);
        }
        for _ in signals {
            push(String::new(), 32);
        }
        drop(push);
        let records = num_records.max(0) as usize;
        let mut cursors = vec![0usize; ns];
        for _ in 0..records {
            for (i, s) in signals.iter().enumerate() {
                for _ in 0..s.spr {
                    let v = s.data[cursors[i] % s.data.len()];
                    cursors[i] += 1;
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }

    fn microvolt_sig(label: &'static str, spr: usize, data: Vec<i16>) -> Sig {
        Sig { label, phys: (-1000.0, 1000.0), dig: (-32768, 32767), spr, data }
    }

    #[test]
    fn parses_a_two_channel_file() {
        let bytes = build(
            &[
                microvolt_sig("EEG C4-M1", 128, vec![0]),
                microvolt_sig("Chin EMG", 64, vec![100, -100]),
            ],
            4,
            1.0,
        );
        let rec = parse_edf(&bytes).unwrap();
        assert_eq!(rec.channels.len(), 2);
        assert_eq!(rec.duration_s, 4.0);
        assert_eq!(rec.patient_id, "patient");
        assert_eq!(rec.start_date, "02.03.04");

        let c4 = &rec.channels[0];
        assert_eq!(c4.label, "EEG C4-M1");
        assert_eq!(c4.sample_rate, 128.0);
        assert_eq!(c4.samples.len(), 512);
        // Digital zero inside [-32768, 32767] sits half a step above the
        // midpoint of the physical range, i.e. within one quantization step
        // of 0 µV.
        let step = 2000.0 / 65535.0;
        for &v in &c4.samples {
            assert!(v.abs() <= step, "sample {v} not ~0");
        }

        let emg = &rec.channels[1];
        assert_eq!(emg.sample_rate, 64.0);
        assert_eq!(emg.samples.len(), 256);
        let a = emg.samples[0];
        let b = emg.samples[1];
        assert!((a - 100.0 * step).abs() < step);
        assert!((b + 100.0 * step).abs() < step);
    }

    #[test]
    fn declared_extremes_map_exactly() {
        let bytes = build(
            &[microvolt_sig("ramp", 3, vec![-32768, 0, 32767])],
            1,
            1.0,
        );
        let rec = parse_edf(&bytes).unwrap();
        let s = &rec.channels[0].samples;
        assert_eq!(s[0], -1000.0);
        assert_eq!(s[2], 1000.0);
        assert!(s[1].abs() < 0.04);
    }

    #[test]
    fn fractional_record_duration_scales_the_rate() {
        let bytes = build(&[microvolt_sig("x", 64, vec![0])], 10, 0.5);
        let rec = parse_edf(&bytes).unwrap();
        assert_eq!(rec.channels[0].sample_rate, 128.0);
        assert_eq!(rec.duration_s, 5.0);
    }

    #[test]
    fn non_numeric_sample_count_reports_its_offset() {
        let mut bytes = build(&[microvolt_sig("x", 4, vec![0])], 1, 1.0);
        // samples-per-record block for a single signal starts at 256 + 216.
        let off = 256 + 216;
        bytes[off..off + 8].copy_from_slice(b"notanum ");
        match parse_edf(&bytes) {
            Err(EdfError::Parse { offset, what }) => {
                assert_eq!(offset, off);
                assert!(what.contains("samples per record"), "{what}");
            }
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn truncated_data_is_reported_with_sizes() {
        let bytes = build(&[microvolt_sig("x", 16, vec![1])], 4, 1.0);
        let cut = bytes.len() - 10;
        match parse_edf(&bytes[..cut]) {
            Err(EdfError::Truncation { expected, got }) => {
                assert_eq!(expected, bytes.len());
                assert_eq!(got, cut);
            }
            other => panic!("expected TruncationError, got {other:?}"),
        }
    }

    #[test]
    fn empty_layouts_are_rejected() {
        let no_signals = build(&[], 4, 1.0);
        assert!(matches!(parse_edf(&no_signals), Err(EdfError::EmptyRecording)));
        let no_records = build(&[microvolt_sig("x", 4, vec![0])], 0, 1.0);
        assert!(matches!(parse_edf(&no_records), Err(EdfError::EmptyRecording)));
    }

    #[test]
    fn zero_digital_span_is_a_parse_error() {
        let bytes = build(
            &[Sig { label: "x", phys: (-10.0, 10.0), dig: (5, 5), spr: 2, data: vec![5] }],
            1,
            1.0,
        );
        assert!(matches!(parse_edf(&bytes), Err(EdfError::Parse { .. })));
    }

    #[test]
    fn unknown_record_count_is_derived_from_length() {
        let bytes = build(&[microvolt_sig("x", 8, vec![7])], 3, 1.0);
        let mut hacked = bytes.clone();
        hacked[236..244].copy_from_slice(b"-1      ");
        let rec = parse_edf(&hacked).unwrap();
        assert_eq!(rec.duration_s, 3.0);
        assert_eq!(rec.channels[0].samples.len(), 24);
    }

    fn synth_channel(label: &str, rate: f64, samples: Vec<f64>) -> Channel {
        Channel::new(label, rate, samples)
    }

    #[test]
    fn write_parse_round_trip_stays_within_half_a_step() {
        let wave: Vec<f64> =
            (0..256).map(|i| 150.0 * (i as f64 * 0.13).sin() + 20.0).collect();
        let slow: Vec<f64> = (0..128).map(|i| -80.0 + i as f64).collect();
        let rec = Recording::new(
            vec![synth_channel("EEG C4-M1", 128.0, wave.clone()),
                 synth_channel("Chin EMG", 64.0, slow.clone())],
            2.0,
        );
        let bytes = write_edf(&rec).unwrap();
        let back = parse_edf(&bytes).unwrap();
        assert_eq!(back.duration_s, 2.0);
        assert_eq!(back.start_date, "01.01.85");
        let step = (8191.75 - -8192.0) / 65535.0;
        for (a, b) in back.channels[0].samples.iter().zip(&wave) {
            assert!((a - b).abs() <= step * 0.5 + 1e-9, "{a} vs {b}");
        }
        for (a, b) in back.channels[1].samples.iter().zip(&slow) {
            assert!((a - b).abs() <= step * 0.5 + 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn writing_is_deterministic() {
        let rec = Recording::new(
            vec![synth_channel("x", 16.0, (0..32).map(|i| i as f64).collect())],
            2.0,
        );
        assert_eq!(write_edf(&rec).unwrap(), write_edf(&rec).unwrap());
    }

    #[test]
    fn declared_extreme_samples_survive_exactly() {
        let rec = Recording::new(
            vec![synth_channel("x", 4.0, vec![-8192.0, 0.0, 8191.75, 1.0])],
            1.0,
        );
        let back = parse_edf(&write_edf(&rec).unwrap()).unwrap();
        assert_eq!(back.channels[0].samples[0], -8192.0);
        assert_eq!(back.channels[0].samples[2], 8191.75);
    }

    #[test]
    fn out_of_range_samples_are_a_calibration_error() {
        let rec =
            Recording::new(vec![synth_channel("x", 2.0, vec![0.0, 9000.0])], 1.0);
        match write_edf(&rec) {
            Err(EdfWriteError::Calibration { label, value, .. }) => {
                assert_eq!(label, "x");
                assert_eq!(value, 9000.0);
            }
            other => panic!("expected CalibrationError, got {other:?}"),
        }
    }

    #[test]
    fn empty_and_ragged_recordings_are_rejected() {
        let empty = Recording::new(vec![], 0.0);
        assert!(matches!(write_edf(&empty), Err(EdfWriteError::EmptyRecording)));

        let ragged = Recording::new(
            vec![
                synth_channel("a", 4.0, vec![0.0; 8]),
                synth_channel("b", 4.0, vec![0.0; 12]),
            ],
            2.0,
        );
        assert!(matches!(write_edf(&ragged), Err(EdfWriteError::Layout { .. })));

        let fractional = Recording::new(vec![synth_channel("c", 2.5, vec![0.0; 5])], 2.0);
        assert!(matches!(write_edf(&fractional), Err(EdfWriteError::Layout { .. })));
    }

    #[test]
    fn oversized_header_fields_are_rejected() {
        let mut rec =
            Recording::new(vec![synth_channel("this label is far too long", 1.0, vec![0.0])], 1.0);
        assert!(matches!(write_edf(&rec), Err(EdfWriteError::FieldOverflow { .. })));
        rec.channels[0].label = "ok".to_owned();
        assert!(write_edf(&rec).is_ok());
    }

    #[test]
    fn annotation_channels_are_consumed_but_dropped() {
        let bytes = build(
            &[
                microvolt_sig("EEG C4-M1", 4, vec![1000, 2000, 3000, 4000]),
                Sig {
                    label: "EDF Annotations",
                    phys: (-1.0, 1.0),
                    dig: (-32768, 32767),
                    spr: 8,
                    data: vec![0x2B00u16 as i16],
                },
            ],
            2,
            1.0,
        );
        let rec = parse_edf(&bytes).unwrap();
        assert_eq!(rec.channels.len(), 1);
        // Second record's first sample must still be the start of the cycle:
        // the annotation signal's bytes were skipped, not misread.
        let ch = &rec.channels[0];
        assert_eq!(ch.samples.len(), 8);
        let step = 2000.0 / 65535.0;
        assert!((ch.samples[4] - 1000.0 * step).abs() < step);
        assert!((ch.samples[7] - 4000.0 * step).abs() < step);
    }
}
