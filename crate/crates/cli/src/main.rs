use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fgt_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fgt: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
