use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lingam_core::hypothesis::{DEFAULT_ALPHA, DEFAULT_PERMUTATIONS};
use lingam_core::prelude::*;

#[derive(Debug, Parser)]
#[command(name = "lingam", version, about = "Causal direction between two variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer the direction between the first two columns of a CSV file.
    Detect(DetectArgs),
    /// Write a synthetic `y = slope * x + noise` sample as CSV.
    Simulate(SimulateArgs),
    /// Run a benchmark over (noise, n) cells and write long-format reports.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Perm,
    Gamma,
}

impl From<MethodArg> for IndependenceMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Perm => IndependenceMethod::PermutationHsic,
            MethodArg::Gamma => IndependenceMethod::GammaHsic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GtArg {
    Jb,
    Ad,
}

impl From<GtArg> for GaussianityTest {
    fn from(g: GtArg) -> Self {
        match g {
            GtArg::Jb => GaussianityTest::JarqueBera,
            GtArg::Ad => GaussianityTest::AndersonDarling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchKind {
    Consistency,
    Tpd,
}

impl BenchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchKind::Consistency => "consistency",
            BenchKind::Tpd => "tpd",
        }
    }
}

/// Independence-test flags shared by `detect` and `bench`.
#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Perm)]
    pub method: MethodArg,
    /// Random permutations for the permutation method.
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    /// Master seed; a fresh one is drawn and printed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// CSV with at least two numeric columns; a header row is optional.
    pub input: PathBuf,
    #[command(flatten)]
    pub test: TestArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1600)]
    pub n: usize,
    /// `gaussian`, `exponential`, `laplace` or `poisson`, optionally `name:param`.
    #[arg(long, default_value = "laplace")]
    pub noise: NoiseKind,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub slope: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub kind: BenchKind,
    #[command(flatten)]
    pub test: TestArgs,
    /// Comma-separated noise families.
    #[arg(long, value_delimiter = ',', default_value = "gaussian,exponential,laplace,poisson")]
    pub noise: Vec<NoiseKind>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "400,800,1600")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub batches: usize,
    #[arg(long, value_enum, default_value_t = GtArg::Jb)]
    pub gt: GtArg,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub slope: f64,
    /// Long-format CSV path; the JSON summary goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the summary to stdout in this format instead of a table.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
