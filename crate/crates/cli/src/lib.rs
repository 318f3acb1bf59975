//! Command-line front end for regulie: verification suites, experiment runs and
//! machine-readable reports.

pub mod checks;
pub mod commands;
pub mod config;
pub mod report;
pub mod suite;
pub mod table;

pub use config::RunConfig;
pub use report::{exit_code, tolerance_scale, CheckReport, Measurement};
pub use suite::{registry, run_suite, run_suite_streaming, Selection, Suite};
pub use table::{emit_table, Format, Table};
