mod config;
mod experiments;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{parse_config, Cli, RunConfig};
use experiments::run_experiment;
use table::write_output;

/// Variable naming the default output directory.
const OUT_DIR_VAR: &str = "STARK_WALK_OUT_DIR";

fn output_path(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.output.clone().or_else(|| {
        std::env::var_os(OUT_DIR_VAR)
            .map(|dir| PathBuf::from(dir).join(format!("{}.{}", cfg.experiment.name(), cfg.format.extension())))
    })
}

fn run() -> Result<bool, String> {
    let cfg = parse_config(Cli::parse())?;
    let outcome = run_experiment(&cfg)?;
    write_output(&outcome.table, cfg.format, output_path(&cfg).as_deref())?;
    Ok(outcome.success)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("stark-walk: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("stark-walk: {e}");
            ExitCode::from(2)
        }
    }
}
