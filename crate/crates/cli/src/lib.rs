//! Suite files, experiment drivers and report writers behind the `wavelab`
//! binary.

// NaN must fail range checks, so they are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod profiles;
pub mod reports;
pub mod verify;

pub use config::{
    parse_suite, serialize, ExperimentKind, ExperimentSuite, ScenarioSpec, SuiteOptions,
};
pub use error::{CliError, Result};
