use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::artifacts::Stage;

#[derive(Debug, Parser)]
#[command(name = "lastmile", version, about = "Learn zone and stop preferences from historical delivery routes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the zone transition matrix from labelled routes.
    Estimate(EstimateArgs),
    /// Learn zone or stop weights with the structured perceptron.
    Train(TrainArgs),
    /// Predict zone and stop orders for every route of a corpus.
    Predict(PredictArgs),
    /// Score predictions against the historical routes.
    Score(ScoreArgs),
    /// Share of zone-order transitions of each kind, per label.
    Report(ReportArgs),
    /// Stratified train/test split.
    Split(SplitArgs),
    /// Generate a synthetic corpus with hidden zone preferences.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Local-search descents per anytime solve.
    #[arg(long, default_value_t = 64)]
    pub iter_cap: u64,
    /// Wall-clock limit per solve; makes results depend on machine speed.
    #[arg(long)]
    pub budget_secs: Option<f64>,
    /// Largest instance solved exactly.
    #[arg(long, default_value_t = 13)]
    pub exact_cap: usize,
}

#[derive(Debug, Clone, Args)]
pub struct QualityArgs {
    #[arg(long, default_value_t = 1.0)]
    pub v_high: f64,
    #[arg(long, default_value_t = 1.0)]
    pub v_medium: f64,
    #[arg(long, default_value_t = 1.0)]
    pub v_low: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub quality: QualityArgs,
    /// Do not count the return to the station.
    #[arg(long)]
    pub no_closing_arc: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub stage: Stage,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Transition matrix artifact (zone stage only).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Comma-separated initial weights; defaults to the stage's start point.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub init: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-5)]
    pub lr: f64,
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Visit training routes in a seeded random order.
    #[arg(long)]
    pub shuffle: bool,
    /// Corpus scored after every epoch.
    #[arg(long)]
    pub validation: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZoneMethodArg {
    Distance,
    Markov,
    /// Markov plus distance with learned or given weights.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StopMethodArg {
    /// Travel time plus zone-order penalties.
    Penalty,
    /// Travel time only; ignores zones.
    TravelTime,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ZoneMethodArg::Mixed)]
    pub zone_method: ZoneMethodArg,
    /// Weights artifact or JSON array `[w_d, w_p]`; default `[1, 1]`.
    #[arg(long)]
    pub zone_weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StopMethodArg::Penalty)]
    pub stop_method: StopMethodArg,
    /// Weights artifact or JSON array of seven weights.
    #[arg(long)]
    pub stop_weights: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Stop,
    Zone,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, value_enum, default_value_t = Level::Stop)]
    pub level: Level,
    /// Per-route CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Cohort means as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Histogram bin counts as CSV.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, default_value_t = 0.5)]
    pub hist_max: f64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving `train.jsonl` and `test.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 250)]
    pub instances: usize,
    #[arg(long, default_value_t = 4)]
    pub grid: usize,
    #[arg(long, default_value_t = 6)]
    pub zones_min: usize,
    #[arg(long, default_value_t = 10)]
    pub zones_max: usize,
    #[arg(long, default_value_t = 3)]
    pub stops_min: usize,
    #[arg(long, default_value_t = 6)]
    pub stops_max: usize,
    /// Medium and low label rates; 0 gives an all-high, unperturbed corpus.
    #[arg(long, default_value_t = 0.45)]
    pub medium_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    pub low_rate: f64,
    /// Planner stop weights, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub stop_weights: Option<Vec<f64>>,
    /// Planner zone weights `w_d,w_p`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub zone_weights: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub oracle: OracleArgs,
}
