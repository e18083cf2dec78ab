//! Command-line front end for `moyal_core`: state factories, transforms,
//! evolution runs and the verification suites, with versioned CSV and
//! JSON outputs.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod verify;

pub use args::Cli;
pub use error::{CliError, CliResult};

use args::Command;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::State { kind } => commands::cmd_state(kind),
        Command::Transform(a) => commands::cmd_transform(a),
        Command::Evolve(a) => commands::cmd_evolve(a),
        Command::Verify(a) => verify::cmd_verify(a),
    }
}
