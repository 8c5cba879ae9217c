use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use treewave::cli::{error_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let code = match run(cli, &mut stdout) {
        Ok(outcome) => outcome.exit_code(),
        Err(err) => {
            eprintln!("error: {err:#}");
            error_code(&err)
        }
    };
    let _ = stdout.flush();
    ExitCode::from(code)
}
