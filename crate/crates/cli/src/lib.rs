//! Library surface of the `ekamm` CLI: argument types, command
//! implementations, and curve sweeps, exposed so integration tests can
//! drive them in-process.

pub mod args;
pub mod commands;
pub mod sweep;

use std::io::Write;

use args::{Cli, Command};
use commands::CliResult;

/// Dispatches a parsed invocation, writing program output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Init(a) => commands::cmd_init(a, out),
        Command::Quote(a) => commands::cmd_quote(a, out),
        Command::Apply(a) => commands::cmd_apply(a, out),
        Command::Replay(a) => commands::cmd_replay(a, out),
        Command::Curve(a) => commands::cmd_curve(a, out),
    }
}
