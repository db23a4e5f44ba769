//! Experiment pipeline for the MAX 2-SAT benchmark: instance generation,
//! exact solving, simulated annealing and analysis tables.

pub mod config;
pub mod error;
pub mod figures;
pub mod pipeline;
pub mod tables;

pub use config::{ExperimentConfig, Overrides};
pub use error::{BenchError, Result, EXIT_BUDGET, EXIT_CONFIG, EXIT_VALIDATION};
pub use figures::{cmd_analyze, AnalyzeReport, Figure, Selection};
pub use pipeline::{cmd_anneal, cmd_generate, cmd_solve, graph_info, AnnealSummary, Manifest, SolveSummary};

/// Runs generate, solve, anneal and every analysis in order.
pub fn run_all(cfg: &ExperimentConfig) -> Result<AnalyzeReport> {
    cmd_generate(cfg)?;
    cmd_solve(cfg)?;
    cmd_anneal(cfg)?;
    cmd_analyze(cfg, Selection::All)
}
