//! Batch verification of the canonical fractional Lagrange geometry of a
//! polynomial density.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod report;
pub mod runner;

pub use checks::{Check, CheckContext, CheckRegistry};
pub use config::{ConfigError, Job, JobConfig};
pub use report::{CheckRecord, Verdict, VerificationReport};
pub use runner::{run_job, Overrides};
