//! Experiment runner for `kloptim`: zoo problems by id, trace CSVs, JSON
//! summaries, rate fits and the acceptance suite.

pub mod analysis;
pub mod config;
pub mod criteria;
pub mod csv;
pub mod error;
pub mod fit;
pub mod problems;
pub mod run;
pub mod suite;

pub use config::{Algo, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use fit::cmd_fit;
pub use run::{cmd_run, ResultBundle};
pub use suite::cmd_suite;
