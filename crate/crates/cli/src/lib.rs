//! Experiment driver and report plumbing behind the `qtest` binary.

pub mod config;
pub mod experiment;
pub mod report;
