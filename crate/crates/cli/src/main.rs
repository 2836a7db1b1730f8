//! `netspec`: reports and plots for periodic planar resistor networks.
//!
//! Exit codes: 0 when every asserted check passes, 1 when one fails, 2 for usage or
//! malformed input, 3 for I/O errors.

mod commands;
mod config;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::Outcome;
use config::{Cli, CliError, RunConfig};

fn write_artifacts(cfg: &RunConfig, outcome: &Outcome) -> Result<(), CliError> {
    let dir = &cfg.options.out;
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
    let stem = cfg.stem();
    let report = json!({
        "command": cfg.command.name(),
        "input": cfg.command.input(),
        "pass": outcome.pass,
        "report": outcome.report,
    });
    let mut files = vec![(format!("{stem}.json"), serde_json::to_string_pretty(&report).expect("JSON values serialize") + "\n")];
    files.extend(outcome.artifacts.iter().map(|(ext, body)| (format!("{stem}.{ext}"), body.clone())));
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|source| CliError::Write { path, source })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let outcome = commands::run(&cfg)?;
        write_artifacts(&cfg, &outcome)?;
        Ok((cfg, outcome))
    });
    match result {
        Ok((cfg, outcome)) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            let status = if outcome.pass { "PASS" } else { "FAIL" };
            println!("{}: {status} (report in {})", cfg.command.name(), cfg.options.out.display());
            ExitCode::from(u8::from(!outcome.pass))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
