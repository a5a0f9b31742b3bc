mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Sweep};
use error::CliError;

/// Caps the rayon pool when WRTLAB_THREADS is set to a positive integer.
fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WRTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "WRTLAB_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    init_threads()?;
    match &cli.command {
        Command::Build(a) => commands::build(a),
        Command::Verify(a) => commands::verify(a),
        Command::Sweeps(s) => match s {
            Sweep::U0(a) => commands::sweep_u0(a),
            Sweep::Bounds(a) => commands::sweep_bounds(a),
            Sweep::Holder(a) => commands::sweep_holder(a),
            Sweep::Multikernel(a) => commands::sweep_multikernel(a),
            Sweep::Slice(a) => commands::sweep_slice(a),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
