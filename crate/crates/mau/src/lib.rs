//! Scenario files, trace and map formats, the run matrix and reports for
//! the `mau-core` simulator.

pub mod config;
pub mod files;
pub mod matrix;
pub mod report;
pub mod units;
