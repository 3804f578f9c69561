//! Run-directory schema and atomic output staging.
//!
//! Every command that writes files assembles them in a hidden sibling
//! directory first and swaps it into place only once everything is on
//! disk, so a failed run never leaves partial artifacts behind.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use noctua_core::annotate::MicroAnnotation;
use noctua_core::config::EngineConfig;
use noctua_core::recording::IntegrityReport;
use noctua_core::stage::StagedEpoch;
use noctua_evalkit::{read_hypnogram, Hypnogram};

use crate::error::CliError;

pub const HYPNOGRAM_CSV: &str = "hypnogram.csv";
pub const HYPNOGRAM_JSON: &str = "hypnogram.json";
pub const ANNOTATIONS_JSONL: &str = "annotations.jsonl";
pub const EXPLANATIONS_JSON: &str = "explanations.json";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const CONFIG_TOML: &str = "config.toml";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Provenance record written with every scoring run. Content-addressed
/// (hashes, counts, montage survey) with no timestamps, so identical
/// inputs yield identical manifests.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub input_path: String,
    pub input_sha256: String,
    pub config_sha256: String,
    pub epoch_count: usize,
    pub generates_alpha_rhythm: bool,
    pub montage: MontageSummary,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MontageSummary {
    pub missing_roles: Vec<String>,
    pub channels: Vec<ChannelSummary>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelSummary {
    pub label: String,
    pub role: String,
    pub flatline_fraction: f64,
    pub clipped_fraction: f64,
}

impl MontageSummary {
    pub fn from_report(report: &IntegrityReport) -> Self {
        MontageSummary {
            missing_roles: report.missing_roles.iter().map(|r| r.to_string()).collect(),
            channels: report
                .channels
                .iter()
                .map(|c| ChannelSummary {
                    label: c.label.clone(),
                    role: c.role.to_string(),
                    flatline_fraction: c.flatline_fraction,
                    clipped_fraction: c.clipped_fraction,
                })
                .collect(),
        }
    }
}

/// Collects files for one output directory and swaps them in atomically.
pub struct Staging {
    final_dir: PathBuf,
    tmp_dir: PathBuf,
    committed: bool,
}

impl Staging {
    pub fn begin(final_dir: &Path) -> Result<Self, CliError> {
        let name = final_dir
            .file_name()
            .ok_or_else(|| CliError::Usage(format!("bad output path {}", final_dir.display())))?;
        let tmp_dir =
            final_dir.with_file_name(format!(".tmp-{}", name.to_string_lossy()));
        if tmp_dir.exists() {
            fs::remove_dir_all(&tmp_dir).map_err(CliError::io(&tmp_dir))?;
        }
        fs::create_dir_all(&tmp_dir).map_err(CliError::io(&tmp_dir))?;
        Ok(Staging { final_dir: final_dir.to_path_buf(), tmp_dir, committed: false })
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.tmp_dir.join(name);
        fs::write(&path, bytes).map_err(CliError::io(&path))
    }

    /// Swap the staged directory into place, replacing any previous run.
    pub fn commit(mut self) -> Result<(), CliError> {
        if self.final_dir.exists() {
            fs::remove_dir_all(&self.final_dir).map_err(CliError::io(&self.final_dir))?;
        }
        fs::rename(&self.tmp_dir, &self.final_dir).map_err(CliError::io(&self.final_dir))?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.tmp_dir);
        }
    }
}

/// Read-side view of a scoring run directory.
pub struct RunDir {
    pub path: PathBuf,
}

impl RunDir {
    pub fn open(path: &Path) -> RunDir {
        RunDir { path: path.to_path_buf() }
    }

    fn read(&self, name: &str) -> Result<(PathBuf, Vec<u8>), CliError> {
        let path = self.path.join(name);
        let bytes = fs::read(&path)
            .map_err(|e| CliError::artifact(&path, format!("cannot read: {e}")))?;
        Ok((path, bytes))
    }

    pub fn staged_epochs(&self) -> Result<Vec<StagedEpoch>, CliError> {
        let (path, bytes) = self.read(EXPLANATIONS_JSON)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::artifact(&path, e))
    }

    pub fn annotations(&self) -> Result<Vec<MicroAnnotation>, CliError> {
        let (path, bytes) = self.read(ANNOTATIONS_JSONL)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| CliError::artifact(&path, e))?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| CliError::artifact(&path, e)))
            .collect()
    }

    pub fn hypnogram(&self) -> Result<Hypnogram, CliError> {
        let (path, bytes) = self.read(HYPNOGRAM_CSV)?;
        read_hypnogram(bytes.as_slice(), &path.display().to_string())
            .map_err(|e| CliError::artifact(&path, e))
    }

    pub fn manifest(&self) -> Result<Manifest, CliError> {
        let (path, bytes) = self.read(MANIFEST_JSON)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::artifact(&path, e))
    }

    pub fn config(&self) -> Result<EngineConfig, CliError> {
        let (path, bytes) = self.read(CONFIG_TOML)?;
        let text = std::str::from_utf8(&bytes).map_err(|e| CliError::artifact(&path, e))?;
        EngineConfig::from_toml(text).map_err(|e| CliError::artifact(&path, e))
    }
}

/// Resolve the engine configuration: `--config` wins, then the
/// `NOCTUA_CONFIG` environment variable, then built-in defaults. Returns
/// the canonical TOML text alongside, which is what gets hashed and
/// archived so the manifest is independent of the source file's
/// formatting.
pub fn resolve_config(flag: Option<&Path>) -> Result<(EngineConfig, String), CliError> {
    let env_path = std::env::var_os("NOCTUA_CONFIG").map(PathBuf::from);
    let cfg = match flag.map(Path::to_path_buf).or(env_path) {
        Some(path) => EngineConfig::load(&path)?,
        None => EngineConfig::default(),
    };
    let text = toml::to_string_pretty(&cfg)
        .map_err(|e| CliError::Usage(format!("cannot serialize configuration: {e}")))?;
    Ok((cfg, text))
}
