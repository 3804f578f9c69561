//! Rendering of epoch decision traces.
//!
//! Two consumers, two shapes: a plain-text elimination trace (one line per
//! evaluated rule, ending in the accepted one) for reports and terminals,
//! and a self-contained JSON bundle that packages the raw log, the full
//! rule catalog, and the referenced annotations so an external chat client
//! can answer "why this stage" and "why not stage X" without touching any
//! other file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::MicroAnnotation;
use crate::config::StagerConfig;
use crate::stage::{
    format_pct, ExplanationLog, Provenance, RulePass, StagedEpoch, StageLabel, PASS1_RULES,
    PASS2_RULES, RULE_DEFAULT_FIRST, RULE_INHERIT,
};

/// Bump when the bundle's field layout changes.
pub const BUNDLE_SCHEMA_VERSION: u32 = 1;

/// A rendered elimination trace: one line per log entry, in log order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticExplanation {
    pub epoch_index: usize,
    pub lines: Vec<String>,
}

impl StaticExplanation {
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }
}

/// One referenced annotation, carried with its global id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSnippet {
    pub id: usize,
    #[serde(flatten)]
    pub annotation: MicroAnnotation,
}

/// Everything a conversational client needs to discuss one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub schema_version: u32,
    pub epoch_index: usize,
    pub stage: StageLabel,
    pub provenance: Provenance,
    pub explanation_log: ExplanationLog,
    /// The complete catalog, not just the rules this epoch evaluated:
    /// short-circuiting means later rules never ran, but "why not N1" must
    /// still be answerable.
    pub rule_descriptions: BTreeMap<String, String>,
    pub annotation_snippets: Vec<AnnotationSnippet>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("rule catalog is empty")]
    EmptyCatalog,
    #[error("rule catalog has no entry for rule id {0:?}")]
    UnknownRule(String),
    #[error("explanation references annotation id {0} outside the annotation list")]
    MissingAnnotation(usize),
}

/// Render one epoch's log as an elimination trace.
pub fn render_static(staged: &StagedEpoch) -> StaticExplanation {
    let lines = staged
        .explanation
        .entries
        .iter()
        .map(|entry| {
            let stage = entry.candidate_stage;
            match (entry.pass, entry.criteria_met) {
                (RulePass::Definite, false) => {
                    format!("Not definite {stage} because {}", entry.detail)
                }
                (RulePass::Definite, true) => {
                    format!("The epoch is definite {stage}. {}", entry.detail)
                }
                (RulePass::Transition, false) => {
                    format!("Not {stage} by continuity because {}", entry.detail)
                }
                (RulePass::Transition, true) => {
                    format!("The epoch is {stage} by continuity. {}", entry.detail)
                }
                (RulePass::Inheritance, _) => {
                    format!("The epoch is {stage}, inherited from the previous epoch.")
                }
                (RulePass::Default, _) => format!(
                    "The epoch is {stage} by default: no rule matched and the first epoch has no predecessor."
                ),
            }
        })
        .collect();
    StaticExplanation { epoch_index: staged.epoch_index, lines }
}

/// Plain-text statements of every rule, thresholds taken from the live
/// configuration so the text always matches what actually ran.
pub fn rule_catalog(cfg: &StagerConfig) -> BTreeMap<String, String> {
    let swa = format_pct(cfg.swa_min_coverage);
    let wake = format_pct(cfg.wake_min_coverage);
    let r = format_pct(cfg.r_min_coverage);
    let n1 = format_pct(cfg.n1_lamf_min);
    let half = cfg.n2_half_window_s;
    let (no_transients, transient_window) = if cfg.kcomplex_enabled {
        ("no spindle and no K-complex", "a spindle or K-complex")
    } else {
        ("no spindle", "a spindle")
    };

    let mut catalog = BTreeMap::new();
    catalog.insert(
        PASS1_RULES[0].to_owned(),
        format!("Definite N3: slow wave activity covers more than {swa} of the epoch."),
    );
    catalog.insert(
        PASS1_RULES[1].to_owned(),
        format!(
            "Definite W: alpha rhythm and eye blinks together cover more than {wake} of the epoch."
        ),
    );
    catalog.insert(
        PASS1_RULES[2].to_owned(),
        format!(
            "Definite R: low-amplitude mixed-frequency activity covers more than {r} of the \
             epoch, at least one rapid eye movement is present, chin EMG tone is low, and the \
             epoch contains {no_transients}."
        ),
    );
    catalog.insert(
        PASS1_RULES[3].to_owned(),
        format!(
            "Definite N2: {transient_window} starts in the first {half} seconds of the epoch \
             or in the last {half} seconds of the previous epoch."
        ),
    );
    catalog.insert(
        PASS1_RULES[4].to_owned(),
        format!(
            "Definite N1: the previous epoch is W, low-amplitude mixed-frequency activity \
             covers at least {n1} of the epoch, and, for recordings that generate alpha \
             rhythm, alpha rhythm appears in the current or previous epoch."
        ),
    );
    catalog.insert(
        PASS2_RULES[0].to_owned(),
        format!(
            "R by continuity: the previous epoch is R and the epoch shows low-amplitude \
             mixed-frequency activity and low chin EMG tone with {no_transients}."
        ),
    );
    catalog.insert(
        PASS2_RULES[1].to_owned(),
        format!(
            "N2 by continuity: the previous epoch is N2, alpha rhythm and eye blinks cover at \
             most {wake} of the epoch, no rapid eye movement is present, and slow wave \
             activity covers at most {swa}."
        ),
    );
    catalog.insert(
        RULE_INHERIT.to_owned(),
        "Inheritance: when no rule matches, the epoch keeps the previous epoch's stage."
            .to_owned(),
    );
    catalog.insert(
        RULE_DEFAULT_FIRST.to_owned(),
        format!(
            "First-epoch default: when no rule matches and there is no previous epoch, the \
             epoch is scored {}.",
            cfg.first_epoch_default
        ),
    );
    catalog
}

/// Assemble the self-contained bundle for one staged epoch.
///
/// `annotations` must be the recording's full annotation list in global id
/// order (the order the epoch index assigns).
pub fn build_prompt_bundle(
    staged: &StagedEpoch,
    annotations: &[MicroAnnotation],
    catalog: &BTreeMap<String, String>,
) -> Result<PromptBundle, CatalogError> {
    if catalog.is_empty() {
        return Err(CatalogError::EmptyCatalog);
    }
    for rule_id in &staged.explanation.rule_ids {
        if !catalog.contains_key(rule_id) {
            return Err(CatalogError::UnknownRule(rule_id.clone()));
        }
    }
    let annotation_snippets = staged
        .explanation
        .referenced_annotations
        .iter()
        .map(|&id| {
            annotations
                .get(id)
                .map(|a| AnnotationSnippet { id, annotation: a.clone() })
                .ok_or(CatalogError::MissingAnnotation(id))
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(PromptBundle {
        schema_version: BUNDLE_SCHEMA_VERSION,
        epoch_index: staged.epoch_index,
        stage: staged.stage,
        provenance: staged.provenance,
        explanation_log: staged.explanation.clone(),
        rule_descriptions: catalog.clone(),
        annotation_snippets,
    })
}
