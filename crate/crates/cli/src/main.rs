//! `cinf-rbf`: derive, certify and interpolate with the compactly supported
//! C^∞ kernel `exp(−α(1 + tan(π/2 ‖x‖²))²)`.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid input, 3 refuted sign
//! condition, 4 Gram matrix not positive definite.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use report::{RunReport, Timings};

#[derive(Debug, Parser)]
#[command(
    name = "cinf-rbf",
    version,
    about = "Compactly supported C-infinity RBF toolkit"
)]
struct Cli {
    /// Write a JSON run report to stdout; human-readable output moves to stderr.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the derivative polynomial F_j(a, u).
    Derive(DeriveArgs),
    /// Check the sign conditions F_j(alpha, u) >= 0 for dimension d.
    Verify(VerifyArgs),
    /// Bracket the smallest alpha satisfying the sign conditions.
    AlphaMin(AlphaMinArgs),
    /// Fit an interpolant to scattered data and evaluate it.
    Interp(InterpArgs),
    /// Convergence benchmark on nested grids of the unit cube.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DeriveArgs {
    /// Derivative order j.
    #[arg(long)]
    pub order: u32,
    /// Also print the degree box and the leading term.
    #[arg(long)]
    pub expand: bool,
    /// Largest accepted order.
    #[arg(long, default_value_t = 12)]
    pub max_order: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Shape parameter as an exact fraction or decimal ("2", "5/2", "0.5").
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub dim: usize,
    /// Exact Sturm certification instead of the sampling prescreen.
    #[arg(long)]
    pub rigorous: bool,
    /// Upper end of the prescreen sampling interval in u.
    #[arg(long, default_value_t = cinf_rbf::positivity::DEFAULT_PRESCREEN_U_MAX)]
    pub u_max: f64,
    /// Number of prescreen samples.
    #[arg(long, default_value_t = cinf_rbf::positivity::DEFAULT_PRESCREEN_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaMinArgs {
    #[arg(long)]
    pub dim: usize,
    /// Bracket width, exact fraction or decimal.
    #[arg(long, default_value = "1e-3")]
    pub tol: String,
}

#[derive(Debug, Args, Serialize)]
pub struct InterpArgs {
    /// CSV of centers, one point per row.
    #[arg(long)]
    pub points: PathBuf,
    /// CSV with one value per center.
    #[arg(long)]
    pub values: PathBuf,
    #[arg(long, default_value = "2")]
    pub alpha: String,
    /// Support radius; defaults to about 30 neighbours per center.
    #[arg(long)]
    pub delta: Option<f64>,
    /// CSV of evaluation points; the centers when omitted.
    #[arg(long)]
    pub query: Option<PathBuf>,
    /// Output CSV for predicted values; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report an inverse-iteration estimate of the smallest Gram eigenvalue.
    #[arg(long)]
    pub min_eig: bool,
    /// Write the fitted model as JSON.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Run the exact sign-condition check for (alpha, d) first.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.4)]
    pub delta: f64,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// sincos, franke or gaussian.
    #[arg(long, default_value = "sincos")]
    pub target: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Level k uses (base − 1)·2^k + 1 points per axis.
    #[arg(long, default_value_t = 3)]
    pub base: usize,
    #[arg(long, default_value_t = 2000)]
    pub test_points: usize,
    /// Output CSV; stdout when omitted (and --json is not set).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Refuted,
    NotPositiveDefinite,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Refuted => 3,
            Status::NotPositiveDefinite => 4,
        }
    }
}

/// Failure before a command could produce its regular output.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    NotPositiveDefinite(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Other(_) => 1,
            CliError::NotPositiveDefinite(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::NotPositiveDefinite(m) | CliError::Other(m) => m,
        }
    }
}

/// Regular result of a command.
pub struct Outcome {
    pub outputs: serde_json::Value,
    /// Human-readable text; goes to stdout unless `--json` is set or `data`
    /// occupies stdout.
    pub human: String,
    /// CSV payload for stdout when `--json` is not set.
    pub data: Option<String>,
    pub status: Status,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CINF_RBF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("CINF_RBF_THREADS must be a count, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, inputs) = match &cli.command {
        Command::Derive(a) => ("derive", serde_json::to_value(a)),
        Command::Verify(a) => ("verify", serde_json::to_value(a)),
        Command::AlphaMin(a) => ("alpha-min", serde_json::to_value(a)),
        Command::Interp(a) => ("interp", serde_json::to_value(a)),
        Command::Bench(a) => ("bench", serde_json::to_value(a)),
    };
    let inputs = inputs.unwrap_or(serde_json::Value::Null);

    let mut timings = Timings::default();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Derive(a) => commands::derive(a, &mut timings),
        Command::Verify(a) => commands::verify(a, &mut timings),
        Command::AlphaMin(a) => commands::alpha_min(a, &mut timings),
        Command::Interp(a) => commands::interp(a, &mut timings),
        Command::Bench(a) => commands::bench(a, &mut timings),
    });

    let (outputs, code) = match result {
        Ok(outcome) => {
            match (&outcome.data, cli.json) {
                (_, true) => eprint!("{}", outcome.human),
                // stdout carries the data, so the summary goes to stderr
                (Some(data), false) => {
                    eprint!("{}", outcome.human);
                    print!("{data}");
                }
                (None, false) => print!("{}", outcome.human),
            }
            (outcome.outputs, outcome.status.code())
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            (serde_json::json!({ "error": e.message() }), e.code())
        }
    };

    if cli.json {
        let report = RunReport {
            command: name.to_string(),
            inputs,
            outputs,
            timings: timings.into_map(),
            exit_code: code,
        };
        let mut stdout = std::io::stdout().lock();
        let written = serde_json::to_writer_pretty(&mut stdout, &report)
            .map_err(std::io::Error::from)
            .and_then(|()| writeln!(stdout));
        if let Err(e) = written {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
