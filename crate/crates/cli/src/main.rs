use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rinr_cli::{run, Cli};

fn main() -> ExitCode {
    // Usage errors exit with 2, help and version with 0.
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
