//! Configuration, orchestration and CSV output for the `g2flow` binary.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod phase;
pub mod run;
pub mod scale;
pub mod selftest;
pub mod table;

pub use config::{Monitor, MonitorSet, Prepared, RunConfig};
pub use error::{CliError, CliResult};
