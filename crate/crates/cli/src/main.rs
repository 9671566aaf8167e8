use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use signal_picking_cli::{run, BuiltinName, Command, RunConfig, Source};

#[derive(Parser)]
#[command(name = "signal-picking", version, about = "Solve and verify dynamic information-design games")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve by backward induction and write the solution document.
    Solve(Common),
    /// Solve and export vertex tables and action-value curves as CSV.
    Sweep(Common),
    /// Compare exact evaluation with backward induction and probe deviations.
    Evaluate(Common),
    /// Monte Carlo simulation of the equilibrium.
    Simulate(Common),
    /// Concave closure of a piecewise description read from --input.
    Envelope(Common),
}

#[derive(Args)]
struct Common {
    /// Game specification (or envelope description) in JSON.
    #[arg(long, conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// quickest_detection or detector.
    #[arg(long)]
    builtin: Option<String>,
    /// Jump or flip probability of the builtin chain.
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    /// Waiting cost; 0.1 for quickest_detection and 0.15 for detector by default.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 14)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    trajectories: usize,
    /// Largest accepted gap between exact and backward-induction values.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Stages below the horizon exported by sweep.
    #[arg(long)]
    depth: Option<usize>,
    /// Output file (a directory for sweep); standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(command: Command, args: Common) -> Result<RunConfig> {
    let source = match (args.input, args.builtin) {
        (Some(path), None) => Source::Input(path),
        (None, Some(name)) => {
            let name = BuiltinName::parse(&name)?;
            Source::Builtin { name, p: args.p, c: args.c.unwrap_or(name.default_cost()), horizon: args.horizon }
        }
        _ => bail!("give exactly one of --input and --builtin"),
    };
    Ok(RunConfig {
        command,
        source,
        out: args.out,
        seed: args.seed,
        trajectories: args.trajectories,
        tolerance: args.tolerance,
        depth: args.depth,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Solve(a) => (Command::Solve, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Evaluate(a) => (Command::Evaluate, a),
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Envelope(a) => (Command::Envelope, a),
    };
    let result = config(command, args).and_then(|cfg| run(&cfg, &mut std::io::stdout().lock()));
    match result {
        Ok(outcome) if outcome.passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
