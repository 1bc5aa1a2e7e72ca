//! `gammasum` — densities, entropies, moments and certificates for weighted
//! gamma sums from the command line.
//!
//! Exit codes: 0 success, 1 certification failure, 2 usage or configuration
//! error, 3 numerical failure.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gammasum::density::Engine;
use gammasum::WeightVector;

#[derive(Debug, Parser)]
#[command(name = "gammasum", version, about = "Weighted sums of i.i.d. gamma variables")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density curve on a grid (CSV by default).
    Density(DensityArgs),
    /// Shannon (α = 1) or Rényi entropies; `--alpha inf` gives −ln M.
    Entropy(EntropyArgs),
    /// Central moments of the centred sum up to `--max-order`.
    Moments(MomentsArgs),
    /// Maximal density M and its location.
    Maxdensity(ModelArgs),
    /// Run certification suites; exit status 0 iff every suite passes.
    Certify(CertifyArgs),
    /// Best-effort search of the maximal-density ratio (no verdict).
    Explore(ExploreArgs),
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// Shape γ of the gamma summands.
    #[arg(long = "gamma")]
    shape: f64,

    /// Comma-separated nonnegative weights a_j.
    #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
    weights: WeightVector,

    /// Rescale the weights to sum to one.
    #[arg(long)]
    normalize: bool,

    /// Density engine: closed, cf, convolution, mc (default: automatic).
    #[arg(long, value_parser = parse_engine)]
    engine: Option<Engine>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-9)]
    abs_tol: f64,

    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,

    /// Base seed for every random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Grid `min:max:count` (default: graded grid to mean + 12σ).
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Clone, Args)]
struct EntropyArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Comma-separated Rényi orders; `1` is Shannon, `inf` is −ln M.
    #[arg(long, default_value = "1")]
    alpha: String,
}

#[derive(Debug, Clone, Args)]
struct MomentsArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Highest central moment order.
    #[arg(long, default_value_t = 4)]
    max_order: usize,
}

#[derive(Debug, Clone, Args)]
struct CertifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,

    /// Draws per parameter block.
    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Re-run one serialized case (a case record or bare case inputs).
    #[arg(long)]
    replay: Option<PathBuf>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
struct ExploreArgs {
    /// Shape γ, 0 < γ < 1.
    #[arg(long = "gamma")]
    shape: f64,

    /// Number of summands.
    #[arg(long)]
    n: usize,

    #[arg(long, default_value_t = 200)]
    trials: usize,

    #[command(flatten)]
    common: CommonArgs,
}

fn parse_weights(s: &str) -> Result<WeightVector, String> {
    s.parse().map_err(|e: gammasum::Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: gammasum::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(run::EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(run::EXIT_CONFIG);
        }
    }
    match run::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
