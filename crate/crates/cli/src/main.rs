use std::process::ExitCode;

use clap::Parser;

use quatpoly_cli::args::Cli;

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    ExitCode::from(quatpoly_cli::run(Cli::parse()))
}
