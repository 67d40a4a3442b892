use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use surfmod_cli::{run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            if cli.common.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_table(Some(start.elapsed().as_secs_f64())));
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
