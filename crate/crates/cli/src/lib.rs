//! File formats, JSON reports and the `mia` command-line tool.

pub mod format;
pub mod report;

mod commands;

pub use commands::{run, run_with, ExitCode};
