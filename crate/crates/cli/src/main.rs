use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use presence_cli::{execute, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match execute(&config) {
        Ok(rendered) => {
            if config.output_path.is_none() {
                let mut out = std::io::stdout().lock();
                if out
                    .write_all(rendered.as_bytes())
                    .and_then(|_| out.flush())
                    .is_err()
                {
                    return ExitCode::from(3);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("presence: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
