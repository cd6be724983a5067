use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use raman_memory_cli::{execute, load_config, Cli, CliError};

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = load_config(cli.config.as_deref())?;
    let outcome = execute(cli.command, &cfg, cli.tol)?;
    match cli.out.as_ref().or(cfg.output.as_ref()) {
        Some(path) => std::fs::write(path, &outcome.output)?,
        None => std::io::stdout().lock().write_all(outcome.output.as_bytes())?,
    }
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("ramem: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
