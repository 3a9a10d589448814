//! Run configuration, command orchestration and CSV/JSON artifacts.

mod commands;
mod config;
mod output;

pub use commands::{error_record, run, run_from_path, Command, RunOptions};
pub use config::{
    parse_config, read_config, EntropySection, MacroSection, MicroSection, OracleSection, OutputFormat, OutputSection,
    RunConfig, ScanSection,
};
pub use output::{format_float, Cell, Table, TOOL_NAME, VERSION};
