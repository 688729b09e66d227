//! Experiment driver: configuration, seeded repeated runs, CSV results and
//! significance testing.

mod config;
mod experiment;
mod stats;
mod summary;

pub use config::{
    AlgorithmSpec, ExperimentConfig, InstanceSource, DEFAULT_BUDGET, DEFAULT_REPETITIONS,
};
pub use experiment::{
    cells, derive_seed, execute, execute_on, run_experiment, CellKey, ExperimentOutput, RunRecord,
    RunTiming, RUNS_FILE, SUMMARY_FILE, TIMINGS_FILE,
};
pub use stats::{
    kruskal_wallis, mean_std, mid_ranks, pairwise_bonferroni, rank_sum_test, stat_notation,
    Comparison,
};
pub use summary::{
    build_report, read_runs, read_summary, summarize, summarize_dir, write_report, write_runs,
    write_stats_report, write_summary, write_timings, CellStatus, ReportRow, SummaryRow,
    SIGNIFICANCE,
};
