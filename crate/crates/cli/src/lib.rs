//! Command-line front end: scoring runs, explanations, evaluation,
//! figures, and synthetic data, with one exit code per error class.

pub mod artifacts;
pub mod commands;
pub mod error;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use commands::evaluate::{cmd_evaluate, EvaluateArgs};
use commands::explain::{cmd_explain, ExplainArgs};
use commands::render::{cmd_render, RenderArgs};
use commands::score::{cmd_score, ScoreArgs};
use commands::synth::{cmd_synth, SynthArgs};
use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HypnogramFormat {
    Csv,
    Json,
    Both,
}

impl HypnogramFormat {
    pub fn writes_csv(self) -> bool {
        matches!(self, HypnogramFormat::Csv | HypnogramFormat::Both)
    }

    pub fn writes_json(self) -> bool {
        matches!(self, HypnogramFormat::Json | HypnogramFormat::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExplainFormat {
    /// Human-readable elimination trace.
    Static,
    /// Self-contained JSON prompt bundle.
    Bundle,
}

#[derive(Parser)]
#[command(
    name = "noctua",
    version,
    about = "Deterministic rule-based sleep staging with full explanations",
    after_help = error::EXIT_CODE_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Score EDF recordings into run directories (one per input file).
    Score {
        /// EDF files to score; each becomes <out>/<stem>/.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Engine configuration (TOML); NOCTUA_CONFIG is the fallback.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory that receives the run directories.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Parallel workers across input files.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Which hypnogram flavors to write.
        #[arg(long, value_enum, default_value_t = HypnogramFormat::Both)]
        format: HypnogramFormat,
    },
    /// Print one epoch's explanation from a run directory.
    Explain {
        run_dir: PathBuf,
        epoch_index: usize,
        #[arg(long, value_enum, default_value_t = ExplainFormat::Static)]
        format: ExplainFormat,
    },
    /// Compare a predicted hypnogram (CSV) against a panel of scorer CSVs.
    Evaluate {
        prediction: PathBuf,
        /// Directory of reference hypnogram CSVs, one per scorer.
        scorers: PathBuf,
        #[arg(long, default_value = "evaluation")]
        out: PathBuf,
        /// Agreement-ratio histogram bins.
        #[arg(long, default_value_t = 4)]
        bins: usize,
    },
    /// Draw SVG figures from a run directory.
    Render {
        run_dir: PathBuf,
        /// Whole-night hypnogram staircase.
        #[arg(long)]
        hypnogram: bool,
        /// Single-epoch channel view with annotation overlays.
        #[arg(long)]
        epoch: Option<usize>,
        /// Scorer CSV directory to overlay consensus and disagreements.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Recording to pull traces from, if it moved since scoring.
        #[arg(long)]
        edf: Option<PathBuf>,
        /// Output file (defaults into the run directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic night (EDF + ground truth) from a recipe.
    Synth {
        /// Recipe TOML; omit with --demo for the bundled plan.
        recipe: Option<PathBuf>,
        /// Use the built-in demo recipe.
        #[arg(long)]
        demo: bool,
        /// Override the recipe seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "synth-night")]
        out: PathBuf,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Score { inputs, config, out, jobs, format } => {
            cmd_score(&ScoreArgs { inputs, config, out, jobs, format })
        }
        Command::Explain { run_dir, epoch_index, format } => {
            let stdout = std::io::stdout();
            cmd_explain(&ExplainArgs { run_dir, epoch_index, format }, &mut stdout.lock())
        }
        Command::Evaluate { prediction, scorers, out, bins } => {
            cmd_evaluate(&EvaluateArgs { prediction, scorers, out, bins })
        }
        Command::Render { run_dir, hypnogram, epoch, reference, edf, out } => {
            cmd_render(&RenderArgs { run_dir, hypnogram, epoch, reference, edf, out })
        }
        Command::Synth { recipe, demo, seed, out } => {
            cmd_synth(&SynthArgs { recipe, demo, seed, out })
        }
    }
}
