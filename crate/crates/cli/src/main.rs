use std::process::ExitCode;

use axidiff::args::{Cli, Command};
use axidiff::{emit, run, Exit};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Exit::Usage.code() as u8
            } else {
                0
            });
        }
    };
    let out = match &cli.command {
        Command::Eval(a) => a.output.out.clone(),
        Command::Compare(a) => a.output.out.clone(),
        Command::Convergence(a) => a.output.out.clone(),
        Command::Selftest(_) => None,
    };
    let outcome = run(cli);
    ExitCode::from(emit(&outcome, out.as_deref()).code() as u8)
}
