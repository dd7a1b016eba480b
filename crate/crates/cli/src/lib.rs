//! Configuration, experiment drivers and CSV output for the `chmsav`
//! command-line tool.

pub mod config;
pub mod drivers;
pub mod norms;
pub mod output;
pub mod peaks;

pub use config::{ConfigError, Mode, RawConfig, RunConfig};
pub use drivers::{run_converge, run_invariants, run_simulate, DriverError, RunSummary};
pub use norms::error_norms;
