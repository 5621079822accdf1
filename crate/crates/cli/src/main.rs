use std::io::Write;
use std::process::ExitCode;

use brw_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|payload| {
        match &cli.out {
            Some(path) => std::fs::write(path, payload)?,
            None => std::io::stdout().lock().write_all(payload.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("brw-phase: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
