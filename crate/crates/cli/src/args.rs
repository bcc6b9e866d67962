use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ogl", version, about = "Overlapping group Lasso solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the proximal operator of the penalty at a point.
    Prox(ProxArgs),
    /// Solve one least-squares problem with the overlapping group penalty.
    Solve(SolveArgs),
    /// Solve along a decreasing grid of regularization values.
    Path(PathArgs),
    /// Generate a seeded synthetic dataset with chained overlapping groups.
    Synth(SynthArgs),
    /// Balanced error rate of sign-thresholded predictions.
    Eval(EvalArgs),
    /// Summary statistics of a group file, as JSON.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct ProxArgs {
    /// Input point, one value per line or a single CSV row/column.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long)]
    pub l1: f64,
    #[arg(long)]
    pub l2: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub gap_tol: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Solution CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Problem {
    /// Design matrix CSV (n rows, p columns).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Responses, one per line.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub groups: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// Sets λ1 = λ2 = ρ·λ1_max.
    #[arg(long, conflicts_with_all = ["l1", "l2"], required_unless_present_all = ["l1", "l2"])]
    pub rho: Option<f64>,
    #[arg(long, requires = "l2")]
    pub l1: Option<f64>,
    #[arg(long, requires = "l1")]
    pub l2: Option<f64>,
    /// Relative objective change at which the solver stops.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Solution CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// Comma-separated, strictly decreasing values in (0, 1].
    #[arg(long, value_delimiter = ',')]
    pub rho_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long)]
    pub g: usize,
    #[arg(long)]
    pub group_size: usize,
    #[arg(long, default_value_t = 0)]
    pub overlap: usize,
    #[arg(long, default_value_t = 1)]
    pub active_groups: usize,
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Real-valued scores, thresholded at zero.
    #[arg(long)]
    pub pred: PathBuf,
    /// ±1 labels.
    #[arg(long)]
    pub labels: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long)]
    pub p: usize,
}
