//! Command-line grammar.

use std::path::PathBuf;

use attrconform::Aql;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "attrconform",
    version,
    about = "Bayesian consumer's and producer's risks for attributes sampling plans"
)]
pub struct Cli {
    /// key=value file with defaults for prior, preset, lot_size, trials, seed and format.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the embedded single sampling plans with their tolerance limits.
    Plans(PlansArgs),
    /// One row of conformance probabilities and risks per embedded plan.
    Curves(CurvesArgs),
    /// Full report for one scenario and one observed count.
    Risk(RiskArgs),
    /// Fit beta prior shapes from a mean and/or quantile.
    Elicit(ElicitArgs),
    /// Compare analytic global risks with enumeration or Monte Carlo.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
    Json,
}

#[derive(Debug, Default, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct PriorArgs {
    /// Beta prior shapes as `a,b`.
    #[arg(long, value_name = "A,B", value_parser = parse_pair, conflicts_with = "preset")]
    pub prior: Option<(f64, f64)>,

    /// Row 1-8 of the built-in prior table.
    #[arg(long, value_name = "ROW")]
    pub preset: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct PlanArgs {
    /// Row 1-19 of the embedded plan table.
    #[arg(long, conflicts_with_all = ["aql", "n"])]
    pub plan_index: Option<u32>,

    /// AQL in percent, e.g. 0.065; selects the plan with that AQL.
    #[arg(long, value_parser = parse_aql)]
    pub aql: Option<Aql>,

    /// Sample size, for a plan outside the table (requires --c).
    #[arg(long, requires = "c")]
    pub n: Option<u64>,

    /// Acceptance number.
    #[arg(long, requires = "n")]
    pub c: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlansArgs {
    #[arg(long)]
    pub lot_size: Option<u64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub prior: PriorArgs,

    /// Repeat the table for every built-in prior.
    #[arg(long, conflicts_with_all = ["prior", "preset"])]
    pub sweep_priors: bool,

    #[arg(long)]
    pub lot_size: Option<u64>,

    /// Target the process proportion (x_C = AQL/100) instead of the lot count.
    #[arg(long)]
    pub process: bool,

    /// Observed count for the conformance-probability column (default 0).
    #[arg(long)]
    pub y: Option<u64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[command(flatten)]
    pub prior: PriorArgs,

    #[command(flatten)]
    pub plan: PlanArgs,

    #[arg(long)]
    pub lot_size: Option<u64>,

    /// Target the process proportion instead of the lot count.
    #[arg(long)]
    pub process: bool,

    /// Tolerance limit: a count for lots, a proportion with --process.
    /// Defaults to the rounding rule applied to the plan's AQL.
    #[arg(long, value_name = "X_C")]
    pub x_c: Option<String>,

    /// Observed nonconforming count in the sample (default c).
    #[arg(long)]
    pub y: Option<u64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ElicitArgs {
    /// Prior mean of the proportion nonconforming.
    #[arg(long)]
    pub mean: Option<f64>,

    /// Value the proportion stays below with probability --level.
    #[arg(long, value_name = "P")]
    pub quantile: Option<f64>,

    /// Probability level of --quantile.
    #[arg(long, default_value_t = 0.99)]
    pub level: f64,

    /// Hold the first shape parameter fixed.
    #[arg(long)]
    pub fixed_a: Option<f64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub prior: PriorArgs,

    #[command(flatten)]
    pub plan: PlanArgs,

    #[arg(long)]
    pub lot_size: Option<u64>,

    #[arg(long)]
    pub process: bool,

    #[arg(long, value_name = "X_C")]
    pub x_c: Option<String>,

    /// Tolerance limit handed to the oracle only. A value different from
    /// the analytic x_C is a negative control and should fail.
    #[arg(long, value_name = "X_C")]
    pub oracle_x_c: Option<String>,

    #[arg(long)]
    pub trials: Option<u64>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_aql(s: &str) -> Result<Aql, String> {
    s.parse().map_err(|e: attrconform::Error| e.to_string())
}
