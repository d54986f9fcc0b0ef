//! Command-line configuration and report emission.

mod config;
mod run;
pub mod svg;
mod table;

pub use config::{
    load_file_config, parse_config, Cli, Command, ConfigError, PoolingOptions, RunConfig, DEFAULT_OUTPUT_DIR,
    DEFAULT_SEED, OUTPUT_DIR_ENV,
};
pub use run::{run_and_report, ExperimentReport, Metadata, TableEntry, MH_BINS, MH_RANGE, SUMMARY_FILE};
pub use table::{format_real, Cell, Table, SIGNIFICANT_DIGITS};
