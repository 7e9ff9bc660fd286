use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use depoisson_cli::commands::{EXIT_OK, EXIT_USAGE};
use depoisson_cli::{run, RunConfig};

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(&cfg, &mut out);
    let _ = out.flush();
    match result {
        Ok(outcome) => {
            for f in &outcome.failures {
                eprintln!("depoisson: {f}");
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("depoisson: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
