//! Command line, run artifacts, metrics and ranking.

pub mod cli;
pub mod metrics;
pub mod output;
pub mod report;

pub use cli::{run_cli, Cli};
pub use metrics::{
    compute_metrics, friedman_from_scores, friedman_ranks, rank_ascending, CellSummaryInput, MetricsRow,
    MetricsTable, RankEntry, RankTable, RankedMetric,
};
