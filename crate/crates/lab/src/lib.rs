//! Config-driven experiment suites over the `halfmap` library, with CSV and
//! SVG output.

pub mod config;
pub mod output;
pub mod suites;
pub mod table;

pub use config::{describe, ConfigError, ExperimentConfig, Suite};
pub use suites::{run_suite, SuiteResult};
pub use table::{Cell, Table, Verdict};
