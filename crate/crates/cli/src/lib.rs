//! Config-driven harness over `prodsys-core`: check suites, demo scenarios
//! and single-operation verbs with text or JSON output.

pub mod commands;
pub mod config;
pub mod demos;
pub mod report;
pub mod suites;

pub use commands::{Format, Output};
pub use config::{default_config, parse_config, parse_config_str, ConfigError, SystemConfig};
pub use demos::{run_demo, DemoOutcome};
pub use report::{CheckReport, Status};
pub use suites::{run_check_suite, SuiteError, SuiteOptions};
