//! Command-line front end.
//!
//! Every command writes its artifacts plus a `manifest.json` into `--out-dir`.
//! Artifacts are computed in full before anything is written, and each file is
//! written to a temporary sibling and renamed into place.

mod commands;
pub mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::io::ResponseKind;

pub use manifest::RunManifest;

/// Exit status for each failure class.
pub mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const INGEST: u8 = 2;
    pub const NO_VALID_GRID_POINT: u8 = 3;
    pub const ALL_CANDIDATES_FAILED: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "jumpfinder", version, about = "Jump-point detection with a noisy predictor")]
pub struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "JUMPFINDER_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate the jump, choosing the bandwidth by bootstrap unless one is given.
    Detect(DetectArgs),
    /// Run bootstrap bandwidth selection and report the criterion per candidate.
    Bandwidth(BandwidthArgs),
    /// Generate a synthetic sample as CSV.
    Simulate(SimulateArgs),
    /// Run a replicated simulation design and summarize it.
    Replicate(ReplicateArgs),
    /// Local linear fit on a grid, for display.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResponseArg {
    Continuous,
    Bernoulli,
}

impl From<ResponseArg> for ResponseKind {
    fn from(r: ResponseArg) -> Self {
        match r {
            ResponseArg::Continuous => ResponseKind::Continuous,
            ResponseArg::Bernoulli => ResponseKind::Bernoulli,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "w")]
    pub w_column: String,
    #[arg(long, default_value = "y")]
    pub y_column: String,
    /// Take the natural log of the predictor column.
    #[arg(long)]
    pub log: bool,
    /// Keep rows with predictor in `lo:hi` (after the log transform).
    #[arg(long, value_parser = parse_range)]
    pub window: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value_t = ResponseArg::Continuous)]
    pub response: ResponseArg,
}

#[derive(Debug, Clone, Args)]
pub struct DetectorArgs {
    /// `new` (robust) or `dke`.
    #[arg(long, default_value = "new")]
    pub method: String,
    /// Primary kernel: epanechnikov, triangular or uniform.
    #[arg(long, default_value = "epanechnikov")]
    pub kernel: String,
    /// Discrepancy kernel of the robust detector.
    #[arg(long, default_value = "epanechnikov")]
    pub kstar: String,
    /// Search grid spacing (default: bandwidth / 20).
    #[arg(long)]
    pub grid_spacing: Option<f64>,
    /// Predictor domain `lo:hi` (default: range of the data).
    #[arg(long, value_parser = parse_range)]
    pub domain: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Args)]
pub struct BootstrapArgs {
    /// Candidate bandwidths `lo:hi:count`, evenly spaced.
    #[arg(long, value_parser = parse_grid)]
    pub bandwidth_grid: Option<Grid>,
    #[arg(long, default_value_t = crate::bandwidth::DEFAULT_REPLICATES)]
    pub bootstrap_reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::bandwidth::DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    /// Fixed bandwidth; the bootstrap then only supplies the interval.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Re-run the configuration recorded in a manifest.
    #[arg(long, conflicts_with = "input")]
    pub from_manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BandwidthArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Flat `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// ex1, ex2, compare or phi.
    #[arg(long)]
    pub design: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// normal, laplace or uniform.
    #[arg(long)]
    pub u_dist: Option<String>,
    /// unif, beta(a,b) or beta(a,b)[lo,hi].
    #[arg(long)]
    pub x_dist: Option<String>,
    /// Measurement error standard deviation.
    #[arg(long, conflicts_with = "var_ratio")]
    pub sigma: Option<f64>,
    /// Var(sigma U) / Var(X).
    #[arg(long)]
    pub var_ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the latent predictor as column `x`.
    #[arg(long)]
    pub emit_latent: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplicateArgs {
    /// ex1, ex2 or compare.
    #[arg(long)]
    pub design: String,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value = "normal")]
    pub u_dist: String,
    /// Predictor distribution for the comparison design.
    #[arg(long, default_value = "unif")]
    pub x_dist: String,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Bootstrap resamples per replication; 0 disables the bootstrap.
    #[arg(long, default_value_t = 199)]
    pub bootstrap_reps: usize,
    /// Bandwidth sweep `lo:hi:count`.
    #[arg(long, value_parser = parse_grid)]
    pub sweep: Option<Grid>,
    /// Comma-separated subset of `new,dke`.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long, default_value_t = crate::bandwidth::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Also write per-replication records as CSV.
    #[arg(long)]
    pub raw_csv: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub bandwidth: f64,
    /// Evaluation grid `lo:hi:count` (default: 201 points over the data range).
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// `lo:hi` with `lo < hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let (lo, hi) = (parse_number(lo)?, parse_number(hi)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("empty range `{s}`"))
    }
}

/// Evenly spaced values parsed from `lo:hi:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// `lo:hi:count`, evenly spaced and inclusive of both ends.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(format!("expected lo:hi:count, got `{s}`"));
    };
    let (lo, hi) = (parse_number(lo)?, parse_number(hi)?);
    let count: usize = count.trim().parse().map_err(|_| format!("`{count}` is not a count"))?;
    if count == 0 || lo > hi || (count > 1 && lo == hi) {
        return Err(format!("invalid grid `{s}`"));
    }
    Ok(Grid(crate::bandwidth::linspace(lo, hi, count)))
}

/// An error tagged with the stage that produced it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl StageError {
    pub fn exit_code(&self) -> u8 {
        match (&self.error, self.stage) {
            (Error::NoValidGridPoint, _) => exit::NO_VALID_GRID_POINT,
            (Error::AllCandidatesFailed, _) => exit::ALL_CANDIDATES_FAILED,
            (Error::Parse { .. } | Error::NonPositivePredictor { .. } | Error::EmptyAfterFilter, _) => exit::INGEST,
            (_, "ingest") => exit::INGEST,
            _ => exit::OTHER,
        }
    }
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} failed: {}", self.stage, self.error)
    }
}

pub(crate) trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, StageError>;
}

impl<T> Stage<T> for crate::error::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

/// Parses arguments from the process and runs the selected command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli))
}

pub fn run(cli: Cli) -> u8 {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return exit::OTHER;
        }
        // The global pool can only be built once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let outcome = match &cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Bandwidth(a) => commands::bandwidth(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Replicate(a) => commands::replicate(a),
        Command::Curve(a) => commands::curve(a),
    };
    match outcome {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
