use std::io;
use std::process::ExitCode;

use clap::Parser;
use foldmin_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code as u8)
        }
    }
}
