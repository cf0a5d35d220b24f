use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "mcsp", version, about = "Exact MCSP / (min,+)-convolution toolkit and unique-configuration experiments")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Maximum window sum and its first start for every length.
    Mcsp(McspArgs),
    /// (min,+)-convolution of two sequences of equal length.
    Conv(ConvArgs),
    /// The linear reductions between the two problems.
    Reduce(ReduceArgs),
    /// Decide whether a configuration is unique.
    Unique(UniqueArgs),
    /// Count unique configurations by pruned backtracking.
    Census(CensusArgs),
    /// Random-path estimate and Markov test against the (n/2)! bound.
    Estimate(EstimateArgs),
    /// The exponential family of unique configurations.
    Family(FamilyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mcsp(_) => "mcsp",
            Command::Conv(_) => "conv",
            Command::Reduce(r) => match r.action {
                ReduceAction::Conv2mcsp(_) => "reduce conv2mcsp",
                ReduceAction::Mcsp2conv(_) => "reduce mcsp2conv",
                ReduceAction::Verify(_) => "reduce verify",
            },
            Command::Unique(_) => "unique",
            Command::Census(_) => "census",
            Command::Estimate(_) => "estimate",
            Command::Family(_) => "family",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct McspArgs {
    /// Sequence file: one rational per line.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Use (max,+) instead of (min,+).
    #[arg(long)]
    pub max: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ReduceArgs {
    #[command(subcommand)]
    pub action: ReduceAction,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReduceAction {
    /// Build the MCSP instance encoding conv(X, Y) and decode it back.
    Conv2mcsp(ConvPairArgs),
    /// Build the convolution pair encoding MCSP(A) and recover the maxima.
    Mcsp2conv(McspArgs),
    /// Seeded random round trips through both reductions.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ConvPairArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Largest convolution arity drawn.
    #[arg(long, default_value_t = 40)]
    pub max_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    Alternative,
    Primal,
}

#[derive(Args, Debug, Serialize)]
pub struct UniqueArgs {
    /// Comma-separated starts p_1,...,p_n, e.g. 5,5,1,3,2,1.
    #[arg(long)]
    pub config: String,
    /// LP formulation used for the strict system.
    #[arg(long, value_enum, default_value_t = RouteArg::Alternative)]
    pub route: RouteArg,
}

#[derive(Args, Debug, Serialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
    /// Resumable progress file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 30)]
    pub checkpoint_interval: u64,
    /// Print progress to stderr.
    #[arg(long)]
    pub progress: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
    /// Embed every sample in the JSON report.
    #[arg(long)]
    pub include_samples: bool,
    /// Re-check every completed path with the full uniqueness test.
    #[arg(long)]
    pub verify_paths: bool,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("mode").required(true).args(["verify", "subset"])))]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: usize,
    /// Check all 2^(n-3) instances.
    #[arg(long)]
    pub verify: bool,
    /// Emit the instance of one subset of {4..n}, e.g. 4,6 (empty for none).
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    pub subset: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub shards: usize,
}
