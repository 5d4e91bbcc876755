use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::Parser;
use ibf_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            match std::io::stdout().lock().write_all(out.as_bytes()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) if e.kind() == ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
