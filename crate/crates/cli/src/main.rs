//! `hermitia`: analyses of Hermitian tensors and mixed states from the
//! command line.
//!
//! Exit status is 0 on success (an inconclusive verdict included), 1 when an
//! analysis fails and 2 for unreadable input or bad arguments.

mod commands;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Failure, Outcome, Settings};
use input::{FixtureParams, InputArgs};
use report::{OutputFormat, Report};

#[derive(Debug, Parser)]
#[command(name = "hermitia", version, about = "Hermitian tensor and separability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Acceptance tolerance (hermiticity, residuals, reconstruction, fit).
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive)]
    tol: f64,

    /// Random starts for eigenpair searches.
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    starts: u64,

    /// Seed for starts and random fixtures.
    #[arg(long, global = true, env = "HERMITIA_SEED", default_value_t = 1)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    output: OutputFormat,

    /// Add wall-clock timings to the diagnostics.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hermiticity defect, trace and norm of a tensor.
    Check(InputArgs),
    /// Partial trace keeping the listed modes (1-based).
    Ptrace {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    /// Matrix eigenvalues and the eigen-matrix decomposition.
    Meig(InputArgs),
    /// Largest and smallest Hermitian eigenvalues by multi-start search.
    Heig(InputArgs),
    /// Real rank-one Hermitian decomposition.
    Decompose(InputArgs),
    /// Separability verdict with a re-verified certificate.
    Separability {
        #[command(flatten)]
        input: InputArgs,
        /// Rescale to unit matrix trace first.
        #[arg(long)]
        normalize_trace: bool,
    },
    /// Print a built-in fixture as input JSON.
    Fixture {
        /// example-3.2, example-3.4, example-6.2, rank-one or separable.
        name: String,
        #[command(flatten)]
        params: FixtureParams,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = Settings { tol: cli.tol, starts: cli.starts as usize, seed: cli.seed };

    let (name, args) = match &cli.command {
        Command::Fixture { name, params } => {
            return match input::fixture_json(name, params, cli.seed) {
                Ok(text) => {
                    println!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
        Command::Check(a) => ("check", a),
        Command::Ptrace { input, .. } => ("ptrace", input),
        Command::Meig(a) => ("meig", a),
        Command::Heig(a) => ("heig", a),
        Command::Decompose(a) => ("decompose", a),
        Command::Separability { input, .. } => ("separability", input),
    };

    let load_start = std::time::Instant::now();
    let loaded = match input::load(args, cli.seed) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let load_ms = load_start.elapsed().as_secs_f64() * 1e3;

    let run = match &cli.command {
        Command::Check(_) => commands::check(&loaded, &settings),
        Command::Ptrace { keep, .. } => commands::ptrace(&loaded, keep),
        Command::Meig(_) => commands::meig(&loaded, &settings),
        Command::Heig(_) => commands::heig(&loaded, &settings),
        Command::Decompose(_) => commands::decompose(&loaded, &settings),
        Command::Separability { normalize_trace, .. } => {
            commands::separability(&loaded, &settings, *normalize_trace)
        }
        Command::Fixture { .. } => unreachable!("handled above"),
    };

    let Outcome { results, diagnostics, compute_ms, ok, failure } = match run {
        Ok(o) => o,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(Failure::Analysis(e)) => {
            eprintln!("error: {name} failed: {e}");
            return ExitCode::from(1);
        }
    };
    let timings = cli.timings.then(|| json!({ "load": load_ms, "compute": compute_ms }));
    let report = Report::new(name, &loaded.bytes, results, report::diagnostics(diagnostics, timings));
    println!("{}", report.render(cli.output));
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: {name}: {}", failure.unwrap_or_default());
        ExitCode::from(1)
    }
}
