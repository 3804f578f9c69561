//! Chin tone: each epoch's median RMS envelope, classified against the
//! night-level baseline percentiles. Low wins a tie with high, which can
//! only happen when the baseline is degenerate (a near-constant night).

use super::{AnnotationKind, MicroAnnotation};
use crate::config::EmgConfig;
use crate::dsp;
use crate::profile::EmgBaseline;
use crate::recording::{Channel, Epoch, Role};
use crate::stats;

pub fn classify_emg_tone(
    chin: &Channel,
    baseline: &EmgBaseline,
    epochs: &[Epoch],
    cfg: &EmgConfig,
) -> Vec<MicroAnnotation> {
    let envelope = dsp::moving_rms(&chin.samples, chin.sample_rate, cfg.rms_window_s);
    let mut out = Vec::new();
    for ep in epochs {
        let range = chin.sample_range(ep.start_s, ep.end_s);
        if range.is_empty() {
            continue;
        }
        let med = stats::median(&envelope[range]);
        let kind = if med <= cfg.low_factor * baseline.p10 {
            Some(AnnotationKind::LowEmgTone)
        } else if med >= baseline.p90 {
            Some(AnnotationKind::HighEmgTone)
        } else {
            None
        };
        if let Some(kind) = kind {
            out.push(MicroAnnotation {
                kind,
                start_s: ep.start_s,
                end_s: ep.end_s,
                channel: Role::ChinEMG,
                score: 1.0,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::testutil::{add_tone, chan};
    use crate::recording::segment_epochs;

    const FS: f64 = 128.0;

    fn epochs_for(seconds: f64) -> Vec<Epoch> {
        let rec = crate::recording::Recording::new(vec![], seconds);
        segment_epochs(&rec).unwrap()
    }

    #[test]
    fn epochs_classify_against_the_baseline() {
        let sqrt2 = 2.0_f64.sqrt();
        let mut x = vec![0.0; (90.0 * FS) as usize];
        add_tone(&mut x, FS, 40.0, 5.0 * sqrt2, 0.0, 30.0, 0.0); // RMS 5
        add_tone(&mut x, FS, 40.0, 25.0 * sqrt2, 30.0, 60.0, 0.0); // RMS 25
        add_tone(&mut x, FS, 40.0, 12.0 * sqrt2, 60.0, 90.0, 0.0); // RMS 12
        let chin = chan("Chin1-Chin2", Role::ChinEMG, FS, x);
        let baseline = EmgBaseline { p10: 5.0, p50: 12.0, p90: 20.0 };
        let anns =
            classify_emg_tone(&chin, &baseline, &epochs_for(90.0), &Default::default());
        assert_eq!(anns.len(), 2, "{anns:?}");
        assert_eq!(anns[0].kind, AnnotationKind::LowEmgTone);
        assert_eq!((anns[0].start_s, anns[0].end_s), (0.0, 30.0));
        assert_eq!(anns[1].kind, AnnotationKind::HighEmgTone);
        assert_eq!((anns[1].start_s, anns[1].end_s), (30.0, 60.0));
    }

    #[test]
    fn a_degenerate_baseline_reads_as_low() {
        let sqrt2 = 2.0_f64.sqrt();
        let mut x = vec![0.0; (30.0 * FS) as usize];
        add_tone(&mut x, FS, 40.0, 10.0 * sqrt2, 0.0, 30.0, 0.0);
        let chin = chan("Chin1-Chin2", Role::ChinEMG, FS, x);
        let baseline = EmgBaseline { p10: 10.0, p50: 10.0, p90: 10.0 };
        let anns =
            classify_emg_tone(&chin, &baseline, &epochs_for(30.0), &Default::default());
        assert_eq!(anns.len(), 1);
        assert_eq!(anns[0].kind, AnnotationKind::LowEmgTone);
    }
}
