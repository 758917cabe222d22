//! Library side of the `fgnpc` command-line tool.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod series;

pub use commands::{cmd_compare, cmd_fit, cmd_prior, cmd_simulate, PriorKind};
pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
pub use series::TimeSeriesFile;
