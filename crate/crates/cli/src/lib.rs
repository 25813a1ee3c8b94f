//! `betagraph` command-line tool: reproducible CSV and JSON artifacts for
//! sampling, spectra, limiting laws and convergence diagnostics.
//!
//! Every artifact carries a [`RunManifest`]. JSON outputs embed it under the
//! key `"manifest"`; CSV outputs write it beside the data file (or to stderr
//! when the data goes to stdout). `betagraph replay <manifest>` regenerates
//! the artifact byte for byte.

mod commands;
pub mod emit;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use manifest::{RunManifest, DEFAULT_TIMESTAMP};

/// Exit code for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code for runtime, I/O and accuracy failures.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for malformed command lines.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "betagraph",
    version,
    about = "Beta-ensemble spectra as rooted graph limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a tridiagonal matrix and write it as JSON.
    Sample(SampleArgs),
    /// Eigenvalues of a matrix, ascending.
    Eigen(MatrixCommand),
    /// Spectral measure at a root vertex.
    Rootmeasure(RootMeasureArgs),
    /// Density of a limiting law on a grid.
    Density(LawGridArgs),
    /// Compare the closed-form limit density with the average of the
    /// conditional laws over the root parameter.
    Crosscheck(CrosscheckArgs),
    /// Eigenvalue KS distance to the limit law across matrix sizes.
    Converge(ConvergeArgs),
    /// Statistics of balls around uniformly chosen roots.
    Ballstats(BallStatsArgs),
    /// Moments of a limiting law.
    Moments(MomentsArgs),
    /// Histogram of the eigenvalues of a matrix.
    Histogram(HistogramArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ensemble {
    Hermite,
    Laguerre,
}

impl Ensemble {
    fn name(self) -> &'static str {
        match self {
            Ensemble::Hermite => "hermite",
            Ensemble::Laguerre => "laguerre",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Law {
    Semicircle,
    #[value(alias = "mp")]
    MarchenkoPastur,
    HermiteConditional,
    LaguerreConditional,
}

impl Law {
    fn name(self) -> &'static str {
        match self {
            Law::Semicircle => "semicircle",
            Law::MarchenkoPastur => "marchenko-pastur",
            Law::HermiteConditional => "hermite-conditional",
            Law::LaguerreConditional => "laguerre-conditional",
        }
    }
}

/// `lo:hi:count`, `count` equally spaced points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Grid {
    lo: f64,
    hi: f64,
    count: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let span = self.hi - self.lo;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.hi
                } else {
                    self.lo + span * i as f64 / last
                }
            })
            .collect()
    }
}

impl std::fmt::Display for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!("expected lo:hi:count, got {s:?}"));
    };
    let lo: f64 = lo
        .parse()
        .map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi: f64 = hi
        .parse()
        .map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    let count: usize = count
        .parse()
        .map_err(|e| format!("bad count {count:?}: {e}"))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err("grid bounds must be finite".into());
    }
    if count == 0 {
        return Err("grid count must be positive".into());
    }
    if count > 1 && lo >= hi {
        return Err(format!("grid needs lo < hi, got {lo} and {hi}"));
    }
    Ok(Grid { lo, hi, count })
}

#[derive(Debug, Args)]
struct Output {
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest file for CSV outputs (default: `<out>.manifest.json`, or
    /// standard error when writing to standard output).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Timestamp recorded in the manifest.
    #[arg(long, default_value = DEFAULT_TIMESTAMP)]
    timestamp: String,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[arg(long, value_enum)]
    ensemble: Ensemble,
    #[arg(long)]
    beta: f64,
    /// Aspect ratio, Laguerre only (at least 1).
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

/// A matrix read from a `sample` JSON file, or sampled on the fly.
#[derive(Debug, Args)]
struct MatrixSource {
    /// Matrix JSON written by `sample`.
    #[arg(long, conflicts_with_all = ["ensemble", "beta", "gamma", "n", "seed"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "input", requires_all = ["beta", "n", "seed"])]
    ensemble: Option<Ensemble>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct MatrixCommand {
    #[command(flatten)]
    source: MatrixSource,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct RootMeasureArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Root vertex, `0..n`.
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct LawArgs {
    #[arg(long, value_enum)]
    law: Law,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    gamma: Option<f64>,
    /// Root parameter of a conditional law.
    #[arg(long)]
    u: Option<f64>,
}

#[derive(Debug, Args)]
struct LawGridArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct CrosscheckArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Evaluation points (default: 100 interior points of the support).
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<Grid>,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Fail with exit code 1 if any absolute error exceeds this.
    #[arg(long)]
    max_error: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct BallStatsArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    radius: usize,
    #[arg(long, default_value_t = 10_000)]
    draws: usize,
    #[arg(long)]
    seed: u64,
    /// One summary row instead of one row per draw.
    #[arg(long)]
    summary: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct MomentsArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Highest moment order.
    #[arg(long, default_value_t = 6)]
    max_k: u32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct HistogramArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Bin edges as `lo:hi:count` (`count - 1` bins).
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// A manifest file, or a JSON artifact with an embedded manifest.
    path: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

/// Run the tool on `argv` (program name first) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(commands::Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}
