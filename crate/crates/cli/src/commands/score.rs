//! `noctua score`: EDF in, staged night out.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Serialize;

use noctua_core::annotate::{annotate_recording, build_epoch_index};
use noctua_core::config::EngineConfig;
use noctua_core::edf::parse_edf;
use noctua_core::profile::build_night_profile;
use noctua_core::recording::{check_integrity, map_roles, segment_epochs};
use noctua_core::stage::{stage_recording, Provenance, StageLabel};
use noctua_evalkit::{write_hypnogram, Hypnogram};

use crate::artifacts::{
    resolve_config, sha256_hex, Manifest, MontageSummary, Staging, ANNOTATIONS_JSONL,
    CONFIG_TOML, EXPLANATIONS_JSON, HYPNOGRAM_CSV, HYPNOGRAM_JSON, MANIFEST_JSON,
};
use crate::error::CliError;
use crate::HypnogramFormat;

pub struct ScoreArgs {
    pub inputs: Vec<PathBuf>,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: usize,
    pub format: HypnogramFormat,
}

/// One row of `hypnogram.json`; the CSV carries only epoch and stage.
#[derive(Serialize)]
struct HypnogramRecord {
    epoch: usize,
    stage: StageLabel,
    provenance: Provenance,
    rule_ids: Vec<String>,
}

pub fn cmd_score(args: &ScoreArgs) -> Result<(), CliError> {
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".to_owned()));
    }
    let (cfg, cfg_text) = resolve_config(args.config.as_deref())?;

    // One run directory per input, named by file stem.
    let mut plan = Vec::new();
    let mut seen = BTreeSet::new();
    for input in &args.inputs {
        let stem = input
            .file_stem()
            .ok_or_else(|| CliError::Usage(format!("bad input path {}", input.display())))?
            .to_string_lossy()
            .into_owned();
        if !seen.insert(stem.clone()) {
            return Err(CliError::Usage(format!(
                "two inputs share the run name '{stem}'; rename one"
            )));
        }
        plan.push((input.clone(), args.out.join(stem)));
    }

    let results: Vec<(usize, Result<usize, CliError>)> = if args.jobs == 1 || plan.len() == 1 {
        plan.iter()
            .enumerate()
            .map(|(i, (input, run_dir))| {
                (i, score_one(input, run_dir, &cfg, &cfg_text, args.format))
            })
            .collect()
    } else {
        let queue = Mutex::new((0..plan.len()).collect::<Vec<_>>());
        let results = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for _ in 0..args.jobs.min(plan.len()) {
                scope.spawn(|| loop {
                    let Some(i) = queue.lock().unwrap().pop() else { break };
                    let (input, run_dir) = &plan[i];
                    let res = score_one(input, run_dir, &cfg, &cfg_text, args.format);
                    results.lock().unwrap().push((i, res));
                });
            }
        });
        let mut results = results.into_inner().unwrap();
        results.sort_by_key(|(i, _)| *i);
        results
    };

    // Report in input order; the first failure decides the exit.
    let mut first_err = None;
    for (i, res) in results {
        let (input, run_dir) = &plan[i];
        match res {
            Ok(epochs) => {
                println!("scored {} -> {} ({epochs} epochs)", input.display(), run_dir.display());
            }
            Err(e) => {
                eprintln!("error: {}: {e}", input.display());
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match first_err {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn score_one(
    input: &Path,
    run_dir: &Path,
    cfg: &EngineConfig,
    cfg_text: &str,
    format: HypnogramFormat,
) -> Result<usize, CliError> {
    let bytes = std::fs::read(input).map_err(CliError::io(input))?;
    let mut rec = parse_edf(&bytes)?;
    map_roles(&mut rec, &cfg.roles)?;
    let integrity = check_integrity(&rec);
    let profile = build_night_profile(&rec, cfg)?;
    let epochs = segment_epochs(&rec)?;
    let annotations = annotate_recording(&rec, &profile, &epochs, cfg)?;
    let index = build_epoch_index(annotations, &epochs, rec.duration_s)?;
    let staged = stage_recording(&index, &profile, &cfg.stager_for_run());

    let staging = Staging::begin(run_dir)?;

    if format.writes_csv() {
        let hyp = Hypnogram::new(staged.iter().map(|s| s.stage).collect());
        let mut csv = Vec::new();
        write_hypnogram(&mut csv, &hyp).map_err(CliError::io(&run_dir.join(HYPNOGRAM_CSV)))?;
        staging.write(HYPNOGRAM_CSV, &csv)?;
    }
    if format.writes_json() {
        let rows: Vec<HypnogramRecord> = staged
            .iter()
            .map(|s| HypnogramRecord {
                epoch: s.epoch_index,
                stage: s.stage,
                provenance: s.provenance,
                rule_ids: s.explanation.rule_ids.clone(),
            })
            .collect();
        staging.write(HYPNOGRAM_JSON, &to_json_pretty(&rows, run_dir)?)?;
    }

    // Annotations in index order, so explanation references are line
    // numbers into this file.
    let mut jsonl = Vec::new();
    for a in index.annotations() {
        serde_json::to_writer(&mut jsonl, a)
            .map_err(|e| CliError::artifact(&run_dir.join(ANNOTATIONS_JSONL), e))?;
        jsonl.push(b'\n');
    }
    staging.write(ANNOTATIONS_JSONL, &jsonl)?;

    staging.write(EXPLANATIONS_JSON, &to_json_pretty(&staged, run_dir)?)?;
    staging.write(CONFIG_TOML, cfg_text.as_bytes())?;

    let manifest = Manifest {
        tool: "noctua".to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        input_path: input.display().to_string(),
        input_sha256: sha256_hex(&bytes),
        config_sha256: sha256_hex(cfg_text.as_bytes()),
        epoch_count: staged.len(),
        generates_alpha_rhythm: profile.generates_alpha_rhythm,
        montage: MontageSummary::from_report(&integrity),
    };
    staging.write(MANIFEST_JSON, &to_json_pretty(&manifest, run_dir)?)?;

    staging.commit()?;
    Ok(staged.len())
}

fn to_json_pretty<T: Serialize>(value: &T, run_dir: &Path) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::artifact(run_dir, e))?;
    bytes.push(b'\n');
    Ok(bytes)
}
