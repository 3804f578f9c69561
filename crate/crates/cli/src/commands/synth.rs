//! `noctua synth`: render a recipe (or the bundled demo) into an EDF plus
//! its ground truth.

use std::path::PathBuf;

use noctua_evalkit::{write_hypnogram, Hypnogram};
use noctua_synthpsg::{demo_recipe, synthesize, write_edf, NightRecipe};

use crate::artifacts::Staging;
use crate::error::CliError;

pub const NIGHT_EDF: &str = "night.edf";
pub const TRUTH_JSON: &str = "truth.json";
pub const TRUTH_HYPNOGRAM_CSV: &str = "truth_hypnogram.csv";

pub struct SynthArgs {
    pub recipe: Option<PathBuf>,
    pub demo: bool,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let mut recipe = match (&args.recipe, args.demo) {
        (Some(path), false) => NightRecipe::load(path)?,
        (None, true) => demo_recipe(args.seed.unwrap_or(1)),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of a recipe path or --demo".to_owned(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        recipe.seed = seed;
    }

    let (recording, truth) = synthesize(&recipe)?;
    let edf = write_edf(&recording)?;

    let mut truth_json = serde_json::to_vec_pretty(&truth)
        .map_err(|e| CliError::artifact(&args.out, e))?;
    truth_json.push(b'\n');

    let mut hyp_csv = Vec::new();
    write_hypnogram(&mut hyp_csv, &Hypnogram::new(truth.hypnogram.clone()))
        .map_err(CliError::io(&args.out))?;

    let staging = Staging::begin(&args.out)?;
    staging.write(NIGHT_EDF, &edf)?;
    staging.write(TRUTH_JSON, &truth_json)?;
    staging.write(TRUTH_HYPNOGRAM_CSV, &hyp_csv)?;
    staging.commit()?;

    println!(
        "synthesized {} epochs ({} channels) -> {}",
        truth.hypnogram.len(),
        recording.channels.len(),
        args.out.display()
    );
    Ok(())
}
