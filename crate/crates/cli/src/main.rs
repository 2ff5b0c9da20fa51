mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::Result;

fn run(cli: &Cli) -> Result<()> {
    // Nothing is written unless the command succeeds.
    let mut buf = Vec::new();
    match &cli.command {
        Command::Rabi(args) => commands::rabi(args, cli.format, &mut buf),
        Command::Sweep(args) => commands::sweep(args, cli.format, &mut buf),
        Command::Fluxonium(args) => commands::fluxonium(args, cli.format, &mut buf),
        Command::Gate(args) => commands::gate(args, cli.format, &mut buf),
        Command::Fit(args) => commands::fit(args, cli.format, &mut buf),
    }?;
    let mut out = output::open(cli.out.as_deref())?;
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
