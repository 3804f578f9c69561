//! `noctua explain`: print one epoch's elimination trace, either as the
//! static text or as the JSON prompt bundle for a conversational client.

use std::path::PathBuf;

use noctua_core::explain::{build_prompt_bundle, render_static, rule_catalog};

use crate::artifacts::RunDir;
use crate::error::CliError;
use crate::ExplainFormat;

pub struct ExplainArgs {
    pub run_dir: PathBuf,
    pub epoch_index: usize,
    pub format: ExplainFormat,
}

pub fn cmd_explain(args: &ExplainArgs, out: &mut impl std::io::Write) -> Result<(), CliError> {
    let run = RunDir::open(&args.run_dir);
    let staged = run.staged_epochs()?;
    let epoch = staged
        .get(args.epoch_index)
        .ok_or(CliError::Index { index: args.epoch_index, count: staged.len() })?;

    match args.format {
        ExplainFormat::Static => {
            let text = render_static(epoch).text();
            writeln!(out, "{text}").map_err(CliError::io(&args.run_dir))?;
        }
        ExplainFormat::Bundle => {
            let annotations = run.annotations()?;
            let catalog = rule_catalog(&run.config()?.stager_for_run());
            let bundle = build_prompt_bundle(epoch, &annotations, &catalog)
                .map_err(|e| CliError::artifact(&args.run_dir, e))?;
            let json = serde_json::to_string_pretty(&bundle)
                .map_err(|e| CliError::artifact(&args.run_dir, e))?;
            writeln!(out, "{json}").map_err(CliError::io(&args.run_dir))?;
        }
    }
    Ok(())
}
