//! `noctua render`: SVG figures from a run directory.

use std::path::{Path, PathBuf};

use noctua_core::edf::parse_edf;
use noctua_core::recording::{map_roles, Role};
use noctua_core::EPOCH_SECONDS;
use noctua_evalkit::{majority_consensus, read_panel_dir, EvalError, Hypnogram, ScorerPanel};

use crate::artifacts::RunDir;
use crate::error::CliError;
use crate::svg::{epoch_svg, hypnogram_svg, EpochLane};

pub struct RenderArgs {
    pub run_dir: PathBuf,
    pub hypnogram: bool,
    pub epoch: Option<usize>,
    pub reference: Option<PathBuf>,
    pub edf: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn cmd_render(args: &RenderArgs) -> Result<(), CliError> {
    match (args.hypnogram, args.epoch) {
        (true, None) => render_hypnogram(args),
        (false, Some(epoch)) => render_epoch(args, epoch),
        _ => Err(CliError::Usage(
            "give exactly one of --hypnogram or --epoch <N>".to_owned(),
        )),
    }
}

fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("bad output path {}", path.display())))?;
    let tmp = path.with_file_name(format!(".tmp-{}", name.to_string_lossy()));
    std::fs::write(&tmp, content).map_err(CliError::io(&tmp))?;
    std::fs::rename(&tmp, path).map_err(CliError::io(path))?;
    Ok(())
}

fn load_reference(path: &Path, expected_epochs: usize) -> Result<ScorerPanel, CliError> {
    let named = read_panel_dir(path)?;
    let scorers: Vec<Hypnogram> = named.into_iter().map(|(_, h)| h).collect();
    let panel = majority_consensus(&scorers)?;
    if panel.consensus.epoch_count() != expected_epochs {
        return Err(CliError::Eval(EvalError::Alignment {
            left: expected_epochs,
            right: panel.consensus.epoch_count(),
        }));
    }
    Ok(panel)
}

fn render_hypnogram(args: &RenderArgs) -> Result<(), CliError> {
    let run = RunDir::open(&args.run_dir);
    let predicted = run.hypnogram()?;
    let reference = match &args.reference {
        Some(dir) => Some(load_reference(dir, predicted.epoch_count())?),
        None => None,
    };
    let svg = hypnogram_svg(&predicted, reference.as_ref());
    let path = args.out.clone().unwrap_or_else(|| args.run_dir.join("hypnogram.svg"));
    write_atomic(&path, &svg)?;
    println!("rendered {}", path.display());
    Ok(())
}

fn render_epoch(args: &RenderArgs, epoch: usize) -> Result<(), CliError> {
    let run = RunDir::open(&args.run_dir);
    let manifest = run.manifest()?;
    if epoch >= manifest.epoch_count {
        return Err(CliError::Index { index: epoch, count: manifest.epoch_count });
    }

    // The traces come from the recording itself; the manifest remembers
    // where it was, and --edf overrides if it has moved.
    let edf_path =
        args.edf.clone().unwrap_or_else(|| PathBuf::from(&manifest.input_path));
    let bytes = std::fs::read(&edf_path).map_err(CliError::io(&edf_path))?;
    let mut rec = parse_edf(&bytes)?;
    map_roles(&mut rec, &run.config()?.roles)?;

    let start_s = epoch as f64 * EPOCH_SECONDS;
    let end_s = start_s + EPOCH_SECONDS;
    let lanes: Vec<(String, Role, Vec<f64>)> = rec
        .channels
        .iter()
        .filter(|ch| ch.role != Role::Other)
        .map(|ch| {
            let range = ch.sample_range(start_s, end_s);
            (ch.label.clone(), ch.role, ch.samples[range].to_vec())
        })
        .collect();
    let lane_refs: Vec<EpochLane<'_>> = lanes
        .iter()
        .map(|(label, role, samples)| EpochLane { label, role: *role, samples })
        .collect();

    let annotations: Vec<_> = run
        .annotations()?
        .into_iter()
        .filter(|a| a.start_s < end_s && a.end_s > start_s)
        .collect();

    let svg = epoch_svg(epoch, start_s, &lane_refs, &annotations);
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| args.run_dir.join(format!("epoch_{epoch:04}.svg")));
    write_atomic(&path, &svg)?;
    println!("rendered {}", path.display());
    Ok(())
}
