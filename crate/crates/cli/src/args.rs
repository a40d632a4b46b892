//! Command-line surface.
//!
//! ```text
//! hclip-dgd run            --config FILE [--seed N | --seeds A..B] [--jobs K]
//!                          [--out DIR] [--override SECTION.KEY=VALUE]... [--diag]
//! hclip-dgd verify SUITE   [--config FILE] [suite-specific flags]
//! hclip-dgd plotdata       --runs DIR [--field NAME] [--quantiles LIST]
//!                          [--out DIR] [--svg] [--log-y]
//! hclip-dgd suggest-params --config FILE [--seed N] [--override ...]
//! hclip-dgd validate-graph --config FILE [--horizon T] [--override ...]
//! ```
//!
//! Exit codes: 0 success, 1 a verification found violations (or no feasible
//! parameters exist), 2 invalid configuration or usage, 3 numerical failure
//! during a run.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "hclip-dgd",
    version,
    about = "Distributed clipped gradient descent over switching graphs: ensemble runs, bound verification, and schedule tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Run the configured experiment over its seed range and write CSV telemetry.
    Run(RunArgs),
    /// Re-run a certified bound or condition check and report violations.
    Verify(VerifyArgs),
    /// Reduce finished runs to plot-ready series and an optional SVG chart.
    Plotdata(PlotArgs),
    /// Search for step/clip parameters satisfying every admissibility clause.
    SuggestParams(SuggestArgs),
    /// Validate a mixing-matrix schedule and print its contraction constants.
    ValidateGraph(GraphArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Experiment config (sections: graph, objective, noise, schedule, run).
    #[arg(long)]
    pub config: PathBuf,
    /// Run a single seed instead of the configured range.
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Run an inclusive seed range `A..B` instead of the configured one.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Worker threads (default: all cores). Results are identical either way.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory; overrides the config and HCLIP_DGD_OUT.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override one config value, e.g. `--override schedule.lambda=4`.
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Append a closed-form consensus-bound column to clipped-run CSVs.
    #[arg(long)]
    pub diag: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One of: lemma1, lemma2, lemma5, eq6, condition7, all.
    pub suite: String,
    /// Experiment config; required by every suite except lemma1.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Seed range `A..B` for the run-based suites (default: config seeds).
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    /// lemma1: number of random mixing schedules to test.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// lemma1: largest window-product length checked per start.
    #[arg(long, default_value_t = 200)]
    pub max_gap: usize,
    /// lemma1: window starts sampled per schedule.
    #[arg(long, default_value_t = 4)]
    pub starts: usize,
    /// lemma5: number of (gradient, clip level) pairs.
    #[arg(long, default_value_t = 20)]
    pub pairs: usize,
    /// lemma5: Monte Carlo samples per pair.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// lemma5: clip level above twice the gradient norm by this margin.
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    /// condition7: leave the hopeless-at-desk-scale transient clause out of
    /// the verdict (its numbers are still printed).
    #[arg(long)]
    pub practical: bool,
    /// Master seed for the suites' own randomness (schedules, test points).
    #[arg(long, default_value_t = 0)]
    pub check_seed: u64,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Directory holding `*_seed*.csv` run files.
    #[arg(long)]
    pub runs: PathBuf,
    /// Telemetry column to reduce.
    #[arg(long, default_value = "run_avg_gap")]
    pub field: String,
    /// Comma-separated quantiles in (0, 1).
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub quantiles: String,
    /// Where to write series files (default: the runs directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render an SVG chart of the series.
    #[arg(long)]
    pub svg: bool,
    /// Log-scale the value axis of the chart.
    #[arg(long)]
    pub log_y: bool,
}

#[derive(Args, Debug)]
pub struct SuggestArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Seed whose initial states set the radius/distance constants
    /// (default: first config seed).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Horizon to scan for floor/stochasticity/connectivity violations
    /// (default: one schedule period, at least one window).
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long = "override", value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
}
