use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "wiretap", version, about = "Secrecy rate regions, fading power allocation and small-block wiretap codes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for parallel evaluation (results do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Report rates in nats instead of bits.
    #[arg(long, global = true)]
    pub nats: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate regions.
    #[command(subcommand)]
    Region(RegionCommand),
    /// Layered power allocation over a slowly fading channel.
    #[command(subcommand)]
    Fading(FadingCommand),
    /// Draw small wiretap codes and analyse them exactly.
    Simulate(SimulateArgs),
    /// Channel checks.
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Debug, Subcommand)]
pub enum RegionCommand {
    /// Gaussian secrecy region swept over the power split.
    Gaussian(GaussianArgs),
    /// Secrecy capacity region of a degraded discrete channel.
    Degraded(DegradedArgs),
    /// Sampled inner-bound triples for a general discrete channel.
    Inner(InnerArgs),
}

#[derive(Debug, Subcommand)]
pub enum FadingCommand {
    /// Tabulate a closed-form interference profile.
    ClosedForm(ClosedFormArgs),
    /// Optimise discrete layer powers numerically.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Test Y1 -> Y2 -> Z for stochastic degradedness.
    Degraded(CheckDegradedArgs),
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    #[arg(long)]
    pub power: Option<f64>,
    /// Noise variances `s1,s2,s3` of receiver 1, receiver 2 and the eavesdropper.
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DegradedArgs {
    /// Channel JSON with `y1`, `y2`, `z` kernels.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub mu_grid: Option<Vec<f64>>,
    /// Simplex grid resolution.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub refine_iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub u_cardinality: Option<usize>,
    #[arg(long)]
    pub max_grid_points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InnerArgs {
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Alphabet caps `u,v1,v2`.
    #[arg(long, value_delimiter = ',')]
    pub caps: Option<Vec<usize>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Rayleigh,
    Nakagami,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawArg {
    /// The classical closed form.
    Closed,
    /// The exact stationary solution.
    Stationary,
}

#[derive(Debug, Args, Clone)]
pub struct FadingSpecArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Nakagami shape parameter.
    #[arg(long)]
    pub m: Option<f64>,
    /// Eavesdropper power gain.
    #[arg(long)]
    pub s_prime: Option<f64>,
    #[arg(long)]
    pub power: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    #[command(flatten)]
    pub spec: FadingSpecArgs,
    #[arg(long, value_enum)]
    pub law: Option<LawArg>,
    /// Number of tabulation points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub spec: FadingSpecArgs,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Coding distribution JSON (`"kind": "degraded"` or `"general"`).
    #[arg(long)]
    pub dist: Option<PathBuf>,
    /// Block lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Target rates: `r1,r2` or `r0,r10,r11,r20,r22`.
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    /// Seeds as a list `1,2,5` or an inclusive range `0..19`.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckDegradedArgs {
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
