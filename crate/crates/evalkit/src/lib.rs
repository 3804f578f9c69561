//! Multi-scorer evaluation: consensus hypnograms, analysis-period cropping,
//! agreement metrics (confusion matrices, accuracy, Cohen's kappa), and
//! sleep-architecture summaries with scorer-versus-consensus discrepancies.
//!
//! Everything here is a pure function over [`Hypnogram`]s; the only I/O is
//! the CSV panel loader.

mod hypnogram;
mod matrix;
mod metrics;
mod panel;

pub use hypnogram::{read_hypnogram, read_panel_dir, write_hypnogram, Hypnogram};
pub use matrix::{accuracy, cohen_kappa, confusion_matrix, row_normalize, ConfusionMatrix};
pub use metrics::{
    leave_one_out_mads, mad_vs_consensus, sleep_metrics, SleepMetrics, EPOCH_MINUTES,
};
pub use panel::{
    agreement_distribution, crop_analysis_period, majority_consensus, AgreementHistogram,
    ScorerPanel,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("hypnogram lengths differ: {left} vs {right}")]
    Alignment { left: usize, right: usize },
    #[error("every epoch of every scorer is W; there is no sleep to analyze")]
    NoSleep,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("kappa is undefined: expected agreement equals 1")]
    Degenerate,
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
}
