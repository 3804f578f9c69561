//! Sleep-stage vocabulary and the two-pass rule engine.
//!
//! Pass 1 evaluates the definite rules in strict precedence order
//! (N3, W, R, N2, N1) and stops at the first that fires. Pass 2 applies the
//! two continuity rules. Anything still unstaged inherits from its
//! predecessor; epoch 0 falls back to a configured default. "Undefined" is
//! represented as rule fall-through (`None`), so it cannot appear in
//! output by construction.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::annotate::{AnnotationKind, EpochAnnotationIndex};
use crate::config::StagerConfig;
use crate::profile::NightProfile;

/// The five scored stages.
///
/// Display follows the usual single-letter convention (`W`, `N1`, `N2`,
/// `N3`, `R`); serde uses the same tokens so files stay greppable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StageLabel {
    #[serde(rename = "W")]
    Wake,
    N1,
    N2,
    N3,
    R,
}

impl StageLabel {
    /// Tie-break / iteration order used throughout the crate.
    pub const ALL: [StageLabel; 5] =
        [StageLabel::Wake, StageLabel::N1, StageLabel::N2, StageLabel::N3, StageLabel::R];

    pub fn idx(self) -> usize {
        match self {
            StageLabel::Wake => 0,
            StageLabel::N1 => 1,
            StageLabel::N2 => 2,
            StageLabel::N3 => 3,
            StageLabel::R => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StageLabel::Wake => "W",
            StageLabel::N1 => "N1",
            StageLabel::N2 => "N2",
            StageLabel::N3 => "N3",
            StageLabel::R => "R",
        }
    }

    pub fn parse(token: &str) -> Option<StageLabel> {
        match token.trim() {
            "W" => Some(StageLabel::Wake),
            "N1" => Some(StageLabel::N1),
            "N2" => Some(StageLabel::N2),
            "N3" => Some(StageLabel::N3),
            "R" => Some(StageLabel::R),
            _ => None,
        }
    }

    pub fn is_sleep(self) -> bool {
        self != StageLabel::Wake
    }
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How an epoch got its stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A pass-1 rule fired.
    Definite,
    /// A pass-2 continuity rule fired.
    Transition,
    /// Carried over from the previous epoch.
    Inherited,
    /// Epoch 0 with no rule match: the configured default.
    DefaultFirst,
}

/// Which phase of the decision an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RulePass {
    Definite,
    Transition,
    Inheritance,
    Default,
}

/// One evaluated rule: the stage it argued for, whether its criteria were
/// met, and a self-contained sentence of evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub candidate_stage: StageLabel,
    pub criteria_met: bool,
    pub detail: String,
    pub pass: RulePass,
}

/// The complete decision trace for one epoch. `rule_ids` parallels
/// `entries`; `referenced_annotations` holds global annotation ids (the
/// line numbers of the annotation file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationLog {
    pub entries: Vec<LogEntry>,
    pub rule_ids: Vec<String>,
    pub referenced_annotations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagedEpoch {
    pub epoch_index: usize,
    pub stage: StageLabel,
    pub provenance: Provenance,
    pub explanation: ExplanationLog,
}

/// Pass-1 rule ids in precedence order.
pub const PASS1_RULES: [&str; 5] =
    ["definite-n3", "definite-wake", "definite-r", "definite-n2", "definite-n1"];
/// Pass-2 rule ids in evaluation order.
pub const PASS2_RULES: [&str; 2] = ["continuity-r", "continuity-n2"];
pub const RULE_INHERIT: &str = "inherit";
pub const RULE_DEFAULT_FIRST: &str = "default-first";

/// Percentage with one decimal, half away from zero, trailing `.0`
/// stripped: 0.038 → "3.8%", 0.0 → "0%", 0.5 → "50%".
pub fn format_pct(fraction: f64) -> String {
    let tenths = (fraction * 1000.0).round() / 10.0;
    if tenths == tenths.trunc() {
        format!("{tenths:.0}%")
    } else {
        format!("{tenths:.1}%")
    }
}

/// "3.8%" prefixed with "only" when a threshold was missed — except at a
/// flat 0%, where "only" reads oddly and the published trace omits it.
fn pct_phrase(fraction: f64, met: bool) -> String {
    let pct = format_pct(fraction);
    if met || pct == "0%" {
        pct
    } else {
        format!("only {pct}")
    }
}

/// "a spindle was" / "3 spindles were".
fn count_phrase(n: usize, singular: &str, plural: &str) -> String {
    if n == 1 {
        format!("a {singular} was")
    } else {
        format!("{n} {plural} were")
    }
}

fn capitalize(mut s: String) -> String {
    if let Some(first) = s.get(..1) {
        let upper = first.to_uppercase();
        s.replace_range(..1, &upper);
    }
    s
}

struct RuleOutcome {
    stage: StageLabel,
    rule_id: &'static str,
    met: bool,
    detail: String,
    refs: Vec<usize>,
}

fn rule_definite_n3(idx: &EpochAnnotationIndex, e: usize, cfg: &StagerConfig) -> RuleOutcome {
    let cov = idx.coverage(e, AnnotationKind::Swa);
    let met = cov > cfg.swa_min_coverage;
    RuleOutcome {
        stage: StageLabel::N3,
        rule_id: PASS1_RULES[0],
        met,
        detail: format!(
            "{} of the epoch consists of slow wave activity.",
            pct_phrase(cov, met)
        ),
        refs: idx.ids(e, AnnotationKind::Swa),
    }
}

fn rule_definite_wake(idx: &EpochAnnotationIndex, e: usize, cfg: &StagerConfig) -> RuleOutcome {
    let cov = idx.union_coverage(e, &[AnnotationKind::Alpha, AnnotationKind::EyeBlink]);
    let met = cov > cfg.wake_min_coverage;
    let mut refs = idx.ids(e, AnnotationKind::Alpha);
    refs.extend(idx.ids(e, AnnotationKind::EyeBlink));
    RuleOutcome {
        stage: StageLabel::Wake,
        rule_id: PASS1_RULES[1],
        met,
        detail: format!(
            "{} of the epoch consists of alpha rhythm or other findings consistent with sleep stage W.",
            pct_phrase(cov, met)
        ),
        refs,
    }
}

fn rule_definite_r(idx: &EpochAnnotationIndex, e: usize, cfg: &StagerConfig) -> RuleOutcome {
    let cov = idx.coverage(e, AnnotationKind::Lamf);
    let cov_ok = cov > cfg.r_min_coverage;
    let rems = idx.has(e, AnnotationKind::Rem);
    let low_emg = idx.has(e, AnnotationKind::LowEmgTone);
    let spindles = idx.items(e, AnnotationKind::Spindle).len();
    let kcomplexes = if cfg.kcomplex_enabled {
        idx.items(e, AnnotationKind::KComplex).len()
    } else {
        0
    };
    let met = cov_ok && rems && low_emg && spindles == 0 && kcomplexes == 0;

    let pct = pct_phrase(cov, cov_ok);
    let base = format!("{pct} of the epoch meets the criteria for sleep stage R");
    let detail = if !cov_ok {
        format!("{base}.")
    } else if !rems {
        format!("{base}, but no rapid eye movements were found.")
    } else if !low_emg {
        format!("{base}, but chin EMG tone is not low.")
    } else if spindles > 0 {
        format!("{base}, but {} found in the epoch.", count_phrase(spindles, "spindle", "spindles"))
    } else if kcomplexes > 0 {
        format!(
            "{base}, but {} found in the epoch.",
            count_phrase(kcomplexes, "K-complex", "K-complexes")
        )
    } else {
        format!("{base}, with rapid eye movements and low chin EMG tone.")
    };

    let mut refs = idx.ids(e, AnnotationKind::Lamf);
    refs.extend(idx.ids(e, AnnotationKind::Rem));
    refs.extend(idx.ids(e, AnnotationKind::LowEmgTone));
    refs.extend(idx.ids(e, AnnotationKind::Spindle));
    if cfg.kcomplex_enabled {
        refs.extend(idx.ids(e, AnnotationKind::KComplex));
    }
    RuleOutcome { stage: StageLabel::R, rule_id: PASS1_RULES[2], met, detail, refs }
}

fn rule_definite_n2(idx: &EpochAnnotationIndex, e: usize, cfg: &StagerConfig) -> RuleOutcome {
    let ep = idx.epoch(e);
    let half = cfg.n2_half_window_s;
    let window = |kind, epoch: usize, from: f64, to: f64| idx.ids_starting_in(epoch, kind, from, to);

    let front_sp = window(AnnotationKind::Spindle, e, ep.start_s, ep.start_s + half);
    let rear_sp = if e > 0 {
        let prev = idx.epoch(e - 1);
        window(AnnotationKind::Spindle, e - 1, prev.start_s + half, prev.end_s)
    } else {
        Vec::new()
    };
    let (front_kc, rear_kc) = if cfg.kcomplex_enabled {
        let front = window(AnnotationKind::KComplex, e, ep.start_s, ep.start_s + half);
        let rear = if e > 0 {
            let prev = idx.epoch(e - 1);
            window(AnnotationKind::KComplex, e - 1, prev.start_s + half, prev.end_s)
        } else {
            Vec::new()
        };
        (front, rear)
    } else {
        (Vec::new(), Vec::new())
    };

    let met = !(front_sp.is_empty() && rear_sp.is_empty() && front_kc.is_empty() && rear_kc.is_empty());
    let detail = if met {
        let mut segments = Vec::new();
        if !front_sp.is_empty() {
            segments.push(format!(
                "{} found in the first half of the epoch",
                count_phrase(front_sp.len(), "spindle", "spindles")
            ));
        }
        if !rear_sp.is_empty() {
            segments.push(format!(
                "{} found in the second half of the previous epoch",
                count_phrase(rear_sp.len(), "spindle", "spindles")
            ));
        }
        if !front_kc.is_empty() {
            segments.push(format!(
                "{} found in the first half of the epoch",
                count_phrase(front_kc.len(), "K-complex", "K-complexes")
            ));
        }
        if !rear_kc.is_empty() {
            segments.push(format!(
                "{} found in the second half of the previous epoch",
                count_phrase(rear_kc.len(), "K-complex", "K-complexes")
            ));
        }
        capitalize(format!("{}.", segments.join(", and ")))
    } else if cfg.kcomplex_enabled {
        "no spindle or K-complex starts in the first half of the epoch or the last half of the previous one.".to_owned()
    } else {
        "no spindle starts in the first half of the epoch or the last half of the previous one.".to_owned()
    };

    let mut refs = front_sp;
    refs.extend(rear_sp);
    refs.extend(front_kc);
    refs.extend(rear_kc);
    RuleOutcome { stage: StageLabel::N2, rule_id: PASS1_RULES[3], met, detail, refs }
}

fn rule_definite_n1(
    idx: &EpochAnnotationIndex,
    e: usize,
    prev_stage: Option<StageLabel>,
    profile: &NightProfile,
    cfg: &StagerConfig,
) -> RuleOutcome {
    let prev_is_wake = prev_stage == Some(StageLabel::Wake);
    let cov = idx.coverage(e, AnnotationKind::Lamf);
    let lamf_ok = cov >= cfg.n1_lamf_min;
    let alpha_here = idx.has(e, AnnotationKind::Alpha);
    let alpha_prev = e > 0 && idx.has(e - 1, AnnotationKind::Alpha);
    let alpha_ok = alpha_here || alpha_prev;

    let met = if profile.generates_alpha_rhythm {
        prev_is_wake && lamf_ok && alpha_ok
    } else {
        prev_is_wake && lamf_ok
    };

    let detail = if !prev_is_wake {
        match prev_stage {
            Some(p) => format!("the preceding epoch was {p} rather than W."),
            None => "there is no preceding epoch.".to_owned(),
        }
    } else if !lamf_ok {
        format!(
            "{} of the epoch consists of low-amplitude mixed-frequency activity.",
            pct_phrase(cov, false)
        )
    } else if profile.generates_alpha_rhythm && !alpha_ok {
        "no alpha rhythm was detected in the current or preceding epoch.".to_owned()
    } else if profile.generates_alpha_rhythm {
        format!(
            "The preceding epoch was W, {} of the epoch consists of low-amplitude mixed-frequency activity, and alpha rhythm appears in the current or preceding epoch.",
            format_pct(cov)
        )
    } else {
        format!(
            "The preceding epoch was W and {} of the epoch consists of low-amplitude mixed-frequency activity (alpha clause waived: this recording does not generate alpha rhythm).",
            format_pct(cov)
        )
    };

    let mut refs = idx.ids(e, AnnotationKind::Lamf);
    if profile.generates_alpha_rhythm {
        refs.extend(idx.ids(e, AnnotationKind::Alpha));
        if e > 0 {
            refs.extend(idx.ids(e - 1, AnnotationKind::Alpha));
        }
    }
    RuleOutcome { stage: StageLabel::N1, rule_id: PASS1_RULES[4], met, detail, refs }
}

fn rule_continuity_r(
    idx: &EpochAnnotationIndex,
    e: usize,
    prev_stage: Option<StageLabel>,
    cfg: &StagerConfig,
) -> RuleOutcome {
    let prev_is_r = prev_stage == Some(StageLabel::R);
    let lamf = idx.has(e, AnnotationKind::Lamf);
    let low_emg = idx.has(e, AnnotationKind::LowEmgTone);
    let spindles = idx.items(e, AnnotationKind::Spindle).len();
    let kcomplexes = if cfg.kcomplex_enabled {
        idx.items(e, AnnotationKind::KComplex).len()
    } else {
        0
    };
    let met = prev_is_r && lamf && low_emg && spindles == 0 && kcomplexes == 0;

    let detail = if !prev_is_r {
        match prev_stage {
            Some(p) => format!("the previous epoch was {p} rather than R."),
            None => "there is no previous epoch.".to_owned(),
        }
    } else if !lamf {
        "no low-amplitude mixed-frequency activity was found in the epoch.".to_owned()
    } else if !low_emg {
        "chin EMG tone is not low.".to_owned()
    } else if spindles > 0 {
        format!("{} found in the epoch.", count_phrase(spindles, "spindle", "spindles"))
    } else if kcomplexes > 0 {
        format!("{} found in the epoch.", count_phrase(kcomplexes, "K-complex", "K-complexes"))
    } else {
        "The previous epoch was R and the epoch shows low-amplitude mixed-frequency activity with low chin EMG tone and no spindle or K-complex.".to_owned()
    };

    let mut refs = idx.ids(e, AnnotationKind::Lamf);
    refs.extend(idx.ids(e, AnnotationKind::LowEmgTone));
    refs.extend(idx.ids(e, AnnotationKind::Spindle));
    if cfg.kcomplex_enabled {
        refs.extend(idx.ids(e, AnnotationKind::KComplex));
    }
    RuleOutcome { stage: StageLabel::R, rule_id: PASS2_RULES[0], met, detail, refs }
}

fn rule_continuity_n2(
    idx: &EpochAnnotationIndex,
    e: usize,
    prev_stage: Option<StageLabel>,
    cfg: &StagerConfig,
) -> RuleOutcome {
    let prev_is_n2 = prev_stage == Some(StageLabel::N2);
    let wake_cov = idx.union_coverage(e, &[AnnotationKind::Alpha, AnnotationKind::EyeBlink]);
    let wake_quiet = wake_cov <= cfg.wake_min_coverage;
    let rems = idx.has(e, AnnotationKind::Rem);
    let swa_cov = idx.coverage(e, AnnotationKind::Swa);
    let swa_quiet = swa_cov <= cfg.swa_min_coverage;
    let met = prev_is_n2 && wake_quiet && !rems && swa_quiet;

    let detail = if !prev_is_n2 {
        match prev_stage {
            Some(p) => format!("the previous epoch was {p} rather than N2."),
            None => "there is no previous epoch.".to_owned(),
        }
    } else if !wake_quiet {
        format!("alpha rhythm or eye blinks cover {} of the epoch.", format_pct(wake_cov))
    } else if rems {
        "rapid eye movements were found in the epoch.".to_owned()
    } else if !swa_quiet {
        format!("slow wave activity covers {} of the epoch.", format_pct(swa_cov))
    } else {
        "The previous epoch was N2 and no evidence of a stage change was found.".to_owned()
    };

    let mut refs = idx.ids(e, AnnotationKind::Alpha);
    refs.extend(idx.ids(e, AnnotationKind::EyeBlink));
    refs.extend(idx.ids(e, AnnotationKind::Rem));
    refs.extend(idx.ids(e, AnnotationKind::Swa));
    RuleOutcome { stage: StageLabel::N2, rule_id: PASS2_RULES[1], met, detail, refs }
}

/// Stage every epoch of the index with a full decision trace.
pub fn stage_recording(
    idx: &EpochAnnotationIndex,
    profile: &NightProfile,
    cfg: &StagerConfig,
) -> Vec<StagedEpoch> {
    let mut out: Vec<StagedEpoch> = Vec::with_capacity(idx.epoch_count());
    let mut prev_stage: Option<StageLabel> = None;

    for e in 0..idx.epoch_count() {
        let mut entries = Vec::new();
        let mut rule_ids = Vec::new();
        let mut refs = Vec::new();
        let push = |o: RuleOutcome, pass: RulePass, entries: &mut Vec<LogEntry>,
                        rule_ids: &mut Vec<String>, refs: &mut Vec<usize>| {
            entries.push(LogEntry {
                candidate_stage: o.stage,
                criteria_met: o.met,
                detail: o.detail,
                pass,
            });
            rule_ids.push(o.rule_id.to_owned());
            refs.extend(o.refs);
            o.met.then_some(o.stage)
        };

        let pass1 = [
            rule_definite_n3(idx, e, cfg),
            rule_definite_wake(idx, e, cfg),
            rule_definite_r(idx, e, cfg),
            rule_definite_n2(idx, e, cfg),
            rule_definite_n1(idx, e, prev_stage, profile, cfg),
        ];
        let mut decision: Option<(StageLabel, Provenance)> = None;
        for o in pass1 {
            if let Some(stage) = push(o, RulePass::Definite, &mut entries, &mut rule_ids, &mut refs)
            {
                decision = Some((stage, Provenance::Definite));
                break;
            }
        }

        if decision.is_none() {
            let pass2 = [
                rule_continuity_r(idx, e, prev_stage, cfg),
                rule_continuity_n2(idx, e, prev_stage, cfg),
            ];
            for o in pass2 {
                if let Some(stage) =
                    push(o, RulePass::Transition, &mut entries, &mut rule_ids, &mut refs)
                {
                    decision = Some((stage, Provenance::Transition));
                    break;
                }
            }
        }

        let (stage, provenance) = decision.unwrap_or_else(|| match prev_stage {
            Some(prev) => {
                entries.push(LogEntry {
                    candidate_stage: prev,
                    criteria_met: true,
                    detail: "No rule matched; the stage carries over from the previous epoch."
                        .to_owned(),
                    pass: RulePass::Inheritance,
                });
                rule_ids.push(RULE_INHERIT.to_owned());
                (prev, Provenance::Inherited)
            }
            None => {
                let stage = cfg.first_epoch_default;
                entries.push(LogEntry {
                    candidate_stage: stage,
                    criteria_met: true,
                    detail: "No rule matched and the first epoch has no predecessor.".to_owned(),
                    pass: RulePass::Default,
                });
                rule_ids.push(RULE_DEFAULT_FIRST.to_owned());
                (stage, Provenance::DefaultFirst)
            }
        });

        refs.sort_unstable();
        refs.dedup();
        out.push(StagedEpoch {
            epoch_index: e,
            stage,
            provenance,
            explanation: ExplanationLog { entries, rule_ids, referenced_annotations: refs },
        });
        prev_stage = Some(stage);
    }
    out
}
