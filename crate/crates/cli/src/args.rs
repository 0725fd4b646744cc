//! Command-line and config-file schema. Every subcommand argument struct is
//! also the JSON schema of its config file, so a report's echoed config can be
//! fed back through `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
macro_rules! exec_mode {
    () => {
        "parallel"
    };
}
#[cfg(not(feature = "parallel"))]
macro_rules! exec_mode {
    () => {
        "sequential"
    };
}

#[cfg(debug_assertions)]
macro_rules! profile {
    () => {
        "debug"
    };
}
#[cfg(not(debug_assertions))]
macro_rules! profile {
    () => {
        "release"
    };
}

macro_rules! schema_version {
    () => {
        1
    };
}

pub const SCHEMA_VERSION: u32 = schema_version!();

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nreport schema: ",
    schema_version!(),
    "\nexecution: ",
    exec_mode!(),
    "\nprofile: ",
    profile!()
);

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Parser)]
#[command(name = "primeprog", version, long_version = LONG_VERSION)]
#[command(
    about = "Sieve weights, W-trick majorants and polynomial progressions in prime-rich sets"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// JSON config file with the same keys as the flags; flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Write the report's table as CSV instead of JSON.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub csv: bool,
    /// Seed for sampled quantities.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prime counts from the least-prime-factor sieve.
    Sieve(SieveArgs),
    /// Admissibility check, X_W enumeration, and narrow-tuple search.
    Admissible(AdmissibleArgs),
    /// Builds the set A, picks the W-trick residue and reports f_A.
    MaynardSet(MaynardSetArgs),
    /// Distribution of the majorant over [1, N].
    NuStats(NuStatsArgs),
    /// Local factors and prime classes of a linear form system.
    LocalFactors(LocalFactorsArgs),
    /// Shifted correlations of the majorant against the predicted main term.
    Correlation(CorrelationArgs),
    /// Majorant averages along polynomial shift families.
    PolyForms(PolyFormsArgs),
    /// Polynomial progressions among the primes or in an exported set.
    Search(SearchArgs),
    /// End-to-end run: A, f_A, counting average and matching search.
    Pipeline(PipelineArgs),
    /// Exact checks of the core routines against brute force.
    Selftest,
}

/// Parameters of the set A and the W-trick context.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ExperimentArgs {
    /// Inline tuple, e.g. "0 2 6".
    #[arg(long, conflicts_with = "tuple_file")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<String>,
    /// File holding a whitespace-separated tuple.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple_file: Option<PathBuf>,
    /// At least m + 1 shifts must be prime.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon0: Option<f64>,
    /// Upper end N' of the range [1, N'].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_prime: Option<u64>,
    /// Small-prime bound override.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<u64>,
    /// Sieve level exponent override (R = N^eta0).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
    /// Indicator constant override.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Largest number of shifted copies the context must support.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SieveArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
    /// Include every prime up to the limit.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub list: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct AdmissibleArgs {
    #[arg(long, conflicts_with_all = ["tuple_file", "bundled", "search"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<String>,
    #[arg(long, conflicts_with_all = ["bundled", "search"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple_file: Option<PathBuf>,
    /// Use the stored admissible 50-tuple of diameter 246.
    #[arg(long, conflicts_with = "search")]
    #[serde(default, skip_serializing_if = "is_false")]
    pub bundled: bool,
    /// Search for an admissible tuple of this size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<usize>,
    /// Diameter bound for --search.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_diameter: Option<u64>,
    /// Move budget for --search.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Also enumerate X_W for this modulus W.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_w: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct MaynardSetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExperimentArgs,
    /// Write A to this file (JSON header line, then one element per line).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub export: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct NuStatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExperimentArgs,
    /// Averaging length (default: N).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buckets: Option<usize>,
    /// Also scan f_A <= nu over [1, N].
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub majorization: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct LocalFactorsArgs {
    /// Linear form system file (`W =`, `b =`, `r =`, `h =` lines).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmax: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct CorrelationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExperimentArgs,
    /// Comma-separated shifts r_1, ..., r_J.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<String>,
    /// Averaging length (default: N).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// Also run the Euler-product convergence experiment.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub euler: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct PolyFormsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExperimentArgs,
    /// Comma-separated shift polynomials Q_1, ..., Q_J.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polys: Option<String>,
    /// Comma-separated variable names of the polynomials.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vars: Option<String>,
    /// Each variable ranges over [1, H].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    /// Averaging length (default: N).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SearchArgs {
    /// Comma-separated polynomials in y, e.g. "y^2,2*y^2".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polys: Option<String>,
    /// Also require every value plus a gap b <= bmax to be prime.
    #[arg(long, conflicts_with = "set")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bmax: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xmax: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ymax: Option<u64>,
    /// Search in a set exported by `maynard-set --export` instead of the primes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<PathBuf>,
    /// Stop at the first hit in search order.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub first: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exp: ExperimentArgs,
    /// Comma-separated polynomials in y with zero constant term.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polys: Option<String>,
    /// The polynomial variable ranges over [1, M].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_range: Option<u64>,
}
