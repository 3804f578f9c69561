//! `noctua evaluate`: a predicted hypnogram against a scorer panel, the
//! way the paper reads its numbers: crop the analysis period, take the
//! majority consensus, then confusion, agreement, and sleep metrics.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use noctua_core::stage::StageLabel;
use noctua_evalkit::{
    accuracy, agreement_distribution, cohen_kappa, confusion_matrix, crop_analysis_period,
    majority_consensus, mad_vs_consensus, read_hypnogram, read_panel_dir, row_normalize,
    sleep_metrics, EvalError, Hypnogram, SleepMetrics,
};

use crate::artifacts::Staging;
use crate::error::CliError;

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const CONFUSION_COUNTS_CSV: &str = "confusion_counts.csv";
pub const CONFUSION_PCT_CSV: &str = "confusion_pct.csv";

pub struct EvaluateArgs {
    pub prediction: PathBuf,
    pub scorers: PathBuf,
    pub out: PathBuf,
    pub bins: usize,
}

#[derive(Serialize)]
struct Report {
    prediction_path: String,
    scorer_names: Vec<String>,
    epochs_total: usize,
    /// Analysis period, inclusive epoch indices in the uncropped frame.
    crop_first: usize,
    crop_last: usize,
    epochs_evaluated: usize,
    accuracy: f64,
    kappa: f64,
    stage_order: [String; 5],
    confusion_counts: [[u64; 5]; 5],
    confusion_row_pct: [[f64; 5]; 5],
    /// Epochs (uncropped frame) where the consensus vote was tied.
    tie_epochs: Vec<usize>,
    metrics: MetricsBlock,
    agreement_bin_edges: Vec<f64>,
    agreement_agree: Vec<u64>,
    agreement_disagree: Vec<u64>,
}

#[derive(Serialize)]
struct MetricsBlock {
    prediction: BTreeMap<String, f64>,
    consensus: BTreeMap<String, f64>,
    prediction_abs_error: BTreeMap<String, f64>,
    scorer_mad: BTreeMap<String, f64>,
}

fn metric_map(m: &SleepMetrics) -> BTreeMap<String, f64> {
    m.fields().iter().map(|(k, v)| ((*k).to_owned(), *v)).collect()
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.prediction).map_err(CliError::io(&args.prediction))?;
    let prediction =
        read_hypnogram(bytes.as_slice(), &args.prediction.display().to_string())?;
    let named = read_panel_dir(&args.scorers)?;
    let scorer_names: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
    let scorers: Vec<Hypnogram> = named.into_iter().map(|(_, h)| h).collect();

    let full_panel = majority_consensus(&scorers)?;
    let epochs_total = full_panel.consensus.epoch_count();
    if prediction.epoch_count() != epochs_total {
        return Err(CliError::Eval(EvalError::Alignment {
            left: prediction.epoch_count(),
            right: epochs_total,
        }));
    }

    let (first, last) = crop_analysis_period(&full_panel)?;
    let cropped: Vec<Hypnogram> = scorers.iter().map(|s| s.slice(first, last)).collect();
    let panel = majority_consensus(&cropped)?;
    let prediction = prediction.slice(first, last);

    let matrix = confusion_matrix(&prediction, &panel.consensus)?;
    let acc = accuracy(&matrix)?;
    let kappa = cohen_kappa(&matrix)?;
    let row_pct = row_normalize(&matrix);

    let pred_metrics = sleep_metrics(&prediction)?;
    let cons_metrics = sleep_metrics(&panel.consensus)?;
    let scorer_metrics: Vec<SleepMetrics> =
        cropped.iter().map(sleep_metrics).collect::<Result<_, _>>()?;
    let scorer_mad = mad_vs_consensus(&scorer_metrics, &cons_metrics);
    let prediction_abs_error = pred_metrics
        .fields()
        .iter()
        .zip(cons_metrics.fields())
        .map(|((k, p), (_, c))| ((*k).to_owned(), (p - c).abs()))
        .collect();

    let histogram = agreement_distribution(&prediction, &panel, args.bins)?;
    let tie_epochs: Vec<usize> = panel
        .tie_flags
        .iter()
        .enumerate()
        .filter(|(_, &tie)| tie)
        .map(|(t, _)| first + t)
        .collect();

    let report = Report {
        prediction_path: args.prediction.display().to_string(),
        scorer_names,
        epochs_total,
        crop_first: first,
        crop_last: last,
        epochs_evaluated: prediction.epoch_count(),
        accuracy: acc,
        kappa,
        stage_order: StageLabel::ALL.map(|s| s.to_string()),
        confusion_counts: matrix.counts,
        confusion_row_pct: row_pct,
        tie_epochs,
        metrics: MetricsBlock {
            prediction: metric_map(&pred_metrics),
            consensus: metric_map(&cons_metrics),
            prediction_abs_error,
            scorer_mad,
        },
        agreement_bin_edges: histogram.bin_edges,
        agreement_agree: histogram.agree,
        agreement_disagree: histogram.disagree,
    };

    let staging = Staging::begin(&args.out)?;
    let mut json = serde_json::to_vec_pretty(&report)
        .map_err(|e| CliError::artifact(&args.out, e))?;
    json.push(b'\n');
    staging.write(REPORT_JSON, &json)?;
    staging.write(REPORT_CSV, flat_csv(&report).as_bytes())?;
    staging.write(
        CONFUSION_COUNTS_CSV,
        matrix_csv(&report.stage_order, &report.confusion_counts, |v| v.to_string()).as_bytes(),
    )?;
    staging.write(
        CONFUSION_PCT_CSV,
        matrix_csv(&report.stage_order, &report.confusion_row_pct, |v| format!("{v:.1}"))
            .as_bytes(),
    )?;
    staging.commit()?;

    println!(
        "evaluated {} epochs (crop {first}..{last}): accuracy {acc:.4}, kappa {kappa:.4} -> {}",
        report.epochs_evaluated,
        args.out.display()
    );
    Ok(())
}

/// Scalar summary as `key,value` rows.
fn flat_csv(report: &Report) -> String {
    let mut out = String::from("key,value\n");
    let mut push = |k: &str, v: String| {
        let _ = writeln!(out, "{k},{v}");
    };
    push("epochs_total", report.epochs_total.to_string());
    push("crop_first", report.crop_first.to_string());
    push("crop_last", report.crop_last.to_string());
    push("epochs_evaluated", report.epochs_evaluated.to_string());
    push("accuracy", format!("{:.6}", report.accuracy));
    push("kappa", format!("{:.6}", report.kappa));
    push("tie_epoch_count", report.tie_epochs.len().to_string());
    for (prefix, map) in [
        ("prediction", &report.metrics.prediction),
        ("consensus", &report.metrics.consensus),
        ("prediction_abs_error", &report.metrics.prediction_abs_error),
        ("scorer_mad", &report.metrics.scorer_mad),
    ] {
        for (k, v) in map.iter() {
            push(&format!("{prefix}_{k}"), format!("{v:.4}"));
        }
    }
    out
}

/// Reference stages down the rows, predicted across the columns.
fn matrix_csv<T: Copy>(
    order: &[String; 5],
    cells: &[[T; 5]; 5],
    fmt: impl Fn(T) -> String,
) -> String {
    let mut out = String::from("reference\\predicted");
    for name in order {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for (r, row) in cells.iter().enumerate() {
        let _ = write!(out, "{}", order[r]);
        for &cell in row {
            let _ = write!(out, ",{}", fmt(cell));
        }
        out.push('\n');
    }
    out
}
