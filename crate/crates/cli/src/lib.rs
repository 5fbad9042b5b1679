//! Model files, command dispatch and report emission for `algebroidlab`.

pub mod commands;
pub mod model;
pub mod report;

pub use commands::{main_with, run, run_on, Cli, CliError, Command};
pub use model::{parse_model, Model, ModelError};
pub use report::{Format, Report, Status, Table, Verdict};
