//! Command-line driver for the `lgi-core` integrators: configuration,
//! simulation runs and CSV output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{Mode, RunConfig, SystemId};
pub use output::Table;
pub use run::{run, Summary};
