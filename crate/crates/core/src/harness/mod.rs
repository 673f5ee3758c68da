//! Experiment orchestration: configuration, batches of seeded runs, CSV
//! reports and trajectory drawings.

mod config;
mod experiment;
mod report;
mod svg;

pub use config::{
    parse_entries, parse_input_mode, Entry, Profile, Settings, DESK_PROFILE, PAPER_PROFILE,
};
pub use experiment::{
    density_label, run_ablation, run_batch, run_density_sweep, run_experiment, run_games,
    summarize_batches, Batch, BatchSpec, GameBatch, RANDOM_SEARCH_LABEL,
};
pub use report::{
    read_run_csv, read_summary_csv, write_run_csv, write_scores_csv, write_summary_csv,
    write_sweep_csv, OutcomeColumns, RunCsv, SummaryLine, SummaryTable, SCHEMA_LINE,
};
pub use svg::{trajectory_svg, write_trajectory};
