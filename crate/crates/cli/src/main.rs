use std::io;
use std::process::ExitCode;

use clap::Parser;
use heston_stability_cli::{run, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    match run(&cfg, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
