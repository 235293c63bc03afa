//! `pwacomp`: piecewise-affine approximation with certified error bounds.

mod allocate;
mod approx;
mod args;
mod compose;
mod out;
mod staircase;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "pwacomp", version, about = "Piecewise-affine approximation with certified error bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximate a univariate function on an interval.
    Approx(approx::Args),
    /// Decompose an expression, fit every unary node and propagate the error bounds.
    Compose(compose::Args),
    /// Split a breakpoint budget or an error tolerance across the nodes of a decomposition.
    Allocate(allocate::Args),
    /// Tolerance/breakpoint staircase of a univariate function.
    Staircase(staircase::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Approx(a) => approx::run(&a),
        Command::Compose(a) => compose::run(&a),
        Command::Allocate(a) => allocate::run(&a),
        Command::Staircase(a) => staircase::run(&a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
