use std::process::ExitCode;

use clap::Parser;
use uncertlab::{emit, run, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let result = run(&cfg).and_then(|report| {
        for w in &report.config_echo.warnings {
            eprintln!("warning: {w}");
        }
        emit(&cfg, &report)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("uncertlab: {e}");
            ExitCode::from(2)
        }
    }
}
