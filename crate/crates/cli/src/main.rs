use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = roboto_cli::Cli::parse();
    ExitCode::from(roboto_cli::run(cli))
}
