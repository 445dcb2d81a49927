use std::process::ExitCode;

use clap::Parser;
use thinspec_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for p in &report.outputs {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", report.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
