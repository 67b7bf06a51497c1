//! Command-line front end.
//!
//! Every command prints its deterministic results on stdout (JSON, or CSV
//! for tables) and writes a [`RunRecord`] under `<out>/<command>/`. Exit
//! codes: 0 pass, 1 verification failure, 2 usage or input error, 3 numeric
//! non-convergence.

mod commands;
mod record;

use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::error::Error;

pub use record::{params_hash, Resolver, RunRecord};

#[derive(Debug, Parser)]
#[command(name = "planar-ssf", version, about = "Low-energy spectral shift and Wiener sausage asymptotics for planar obstacles")]
pub struct Cli {
    /// Directory for run records
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,
    /// JSON document with parameter values (flags take precedence)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Treat solver warnings as failures
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Obstacle selection shared by several commands.
#[derive(Debug, Clone, Args, Default)]
pub struct ShapeArgs {
    /// disc, square, segment, or a path to a shape JSON file
    #[arg(long)]
    pub shape: Option<String>,
    /// Disc radius
    #[arg(long)]
    pub radius: Option<f64>,
    /// Square side
    #[arg(long)]
    pub side: Option<f64>,
    /// Segment length
    #[arg(long)]
    pub length: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Robin constant R(K) and C(K) = -4πR(K)
    Capacity {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Boundary panels
        #[arg(long)]
        panels: Option<usize>,
    },
    /// Low-energy coefficients of ξ, γ or β
    Coeffs {
        #[arg(long, allow_hyphen_values = true)]
        capacity_const: Option<f64>,
        #[command(flatten)]
        shape: ShapeArgs,
        /// xi, gamma or beta
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        panels: Option<usize>,
    },
    /// Exact disc spectral shift against the truncated series, as CSV
    Ssf {
        #[arg(long)]
        radius: Option<f64>,
        /// logspace:lo:hi:n or a comma-separated list
        #[arg(long)]
        lambda_grid: Option<String>,
        /// Comma-separated series orders from 1..=3
        #[arg(long)]
        orders: Option<String>,
    },
    /// Monte-Carlo expected sausage area
    Sausage {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, allow_hyphen_values = true)]
        time: Option<f64>,
        /// Comma-separated loop durations; emits a CSV sweep
        #[arg(long)]
        times: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Brownian loops pinned at the origin (default)
        #[arg(long, conflicts_with = "free")]
        pinned: bool,
        /// Free Brownian paths
        #[arg(long)]
        free: bool,
        #[arg(long)]
        max_cells: Option<usize>,
    },
    /// Verification pipelines with a pass/fail verdict
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Special-function values on a fixed grid, as CSV
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Lattice-point counts against the closed form and the bound
    Lattice {
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        k_min: Option<i64>,
    },
    /// E[exp(-T_r)] = 1/I0(r) and the loop midpoint variance
    ExitTime {
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Laplace log-moments against their asymptotic series
    Laplace {
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Residuals of the truncated ξ series for the disc
    Remainder {
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Shape to C(K) to series to heat trace to Monte Carlo
    Pipeline {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// What a command produced.
pub struct Outcome {
    pub results: Value,
    /// Printed instead of the JSON results when present.
    pub stdout_csv: bool,
    pub csv: Option<String>,
    pub passed: bool,
    pub seed: Option<u64>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged(_)
        | Error::SingularSystem
        | Error::StepBudget(_)
        | Error::Normalization(_)
        | Error::Divergence { .. }
        | Error::Overflow { .. } => 3,
        Error::Inconsistency { .. } | Error::Consistency { .. } => 1,
        _ => 2,
    }
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    run(cli)
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let config = match cli.config.as_ref().map(|p| -> crate::Result<Value> {
        Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?)
    }) {
        None => None,
        Some(Ok(v)) => Some(v),
        Some(Err(e)) => {
            eprintln!("error: config: {e}");
            return 2;
        }
    };
    let name = commands::command_name(&cli.command);
    let mut resolver = match Resolver::new(config, &name) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let started = Instant::now();
    let outcome = match commands::execute(&cli.command, &mut resolver, cli.strict) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let record = RunRecord {
        command: name,
        parameters: resolver.params,
        results: outcome.results.clone(),
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    let text = if outcome.stdout_csv {
        outcome.csv.clone().unwrap_or_default()
    } else {
        serde_json::to_string_pretty(&outcome.results).unwrap_or_default() + "\n"
    };
    // a closed pipe downstream is not an error of ours
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if let Err(e) = record.write(&cli.out, outcome.csv.as_deref()) {
        eprintln!("error: writing run record: {e}");
        return 2;
    }
    if outcome.passed {
        0
    } else {
        1
    }
}
