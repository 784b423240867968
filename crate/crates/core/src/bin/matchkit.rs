use std::process::ExitCode;

use clap::Parser;
use matchkit::cli::{self, Cli};
use matchkit::tolerance;

fn main() -> ExitCode {
    if std::env::var_os("MATCHKIT_EPS").is_some() && tolerance::init_from_env().is_none() {
        eprintln!("error: MATCHKIT_EPS must be a non-negative number");
        return ExitCode::from(cli::EXIT_USAGE);
    }
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    ExitCode::from(cli::run(&cli, &mut lock))
}
