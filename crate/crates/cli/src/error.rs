//! One error type per failure class, each with its own exit code so
//! scripts can tell a bad montage from a bad recipe without parsing text.

use thiserror::Error;

use noctua_core::annotate::{AlignmentError, AnnotateError};
use noctua_core::config::ConfigError;
use noctua_core::edf::{EdfError, EdfWriteError};
use noctua_core::profile::ProfileError;
use noctua_core::recording::{EpochError, RoleError};
use noctua_evalkit::EvalError;
use noctua_synthpsg::RecipeError;

/// Exit codes, one per error class. `2` is reserved for argument parsing
/// (the clap default).
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const EDF: i32 = 4;
    pub const PROFILE: i32 = 5;
    pub const PIPELINE: i32 = 6;
    pub const EVAL: i32 = 7;
    pub const RECIPE: i32 = 8;
    pub const INDEX: i32 = 9;
    pub const ARTIFACT: i32 = 10;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Edf(#[from] EdfError),
    #[error(transparent)]
    EdfWrite(#[from] EdfWriteError),
    #[error(transparent)]
    Role(#[from] RoleError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Epoch(#[from] EpochError),
    #[error(transparent)]
    Annotate(#[from] AnnotateError),
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Recipe(#[from] RecipeError),
    #[error("epoch {index} out of range: the run has {count} epochs")]
    Index { index: usize, count: usize },
    #[error("run artifact {path}: {message}")]
    Artifact { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Usage(_) => exit::USAGE,
            CliError::Config(_) => exit::CONFIG,
            CliError::Edf(_) | CliError::EdfWrite(_) => exit::EDF,
            CliError::Role(_) | CliError::Profile(_) => exit::PROFILE,
            CliError::Epoch(_) | CliError::Annotate(_) | CliError::Alignment(_) => exit::PIPELINE,
            CliError::Eval(_) => exit::EVAL,
            CliError::Recipe(_) => exit::RECIPE,
            CliError::Index { .. } => exit::INDEX,
            CliError::Artifact { .. } => exit::ARTIFACT,
        }
    }

    pub(crate) fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn artifact(path: &std::path::Path, message: impl ToString) -> CliError {
        CliError::Artifact { path: path.display().to_string(), message: message.to_string() }
    }
}

/// Text for `--help`, kept beside the codes it documents.
pub const EXIT_CODE_HELP: &str = "Exit codes:
  0   success
  1   filesystem I/O failure
  2   bad command line
  3   invalid configuration
  4   EDF parse or write failure
  5   montage or night-profile failure
  6   annotation or staging failure
  7   evaluation failure
  8   recipe failure
  9   epoch index out of range
  10  missing or corrupt run artifacts";
