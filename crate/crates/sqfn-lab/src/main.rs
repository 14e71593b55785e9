use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sqfn_lab::cli::{self, RunStatus};
use sqfn_lab::config::Command as RunCommand;

/// Numerical laboratory for intrinsic square functions, Muckenhoupt
/// weights, and weighted Herz norms on a discretized box.
#[derive(Parser)]
#[command(name = "sqfn-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the flat-key config file
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, e.g. --set herz.alpha=0.25 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a field, apply the square-function operators, export fields
    Compute(RunArgs),
    /// Run a boundedness / scaling / comparability check; refuses
    /// out-of-hypothesis parameter tuples with exit status 2
    Verify(RunArgs),
    /// Same sweeps as verify, but exploratory: inadmissible tuples run and
    /// are labeled out-of-hypothesis instead of refused
    Sweep(RunArgs),
    /// Recompute a quantity across grid refinements
    Refine(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Command::Compute(a) => (RunCommand::Compute, a),
        Command::Verify(a) => (RunCommand::Verify, a),
        Command::Sweep(a) => (RunCommand::Sweep, a),
        Command::Refine(a) => (RunCommand::Refine, a),
    };
    match cli::run(command, &args.config, &args.set) {
        Ok(RunStatus::Success) => ExitCode::SUCCESS,
        Ok(RunStatus::Refused { clause }) => {
            eprintln!("refused: {clause}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
