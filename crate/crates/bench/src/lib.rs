//! Benchmark harness: builds every index, hash map and filter variant over a
//! dataset, checks each against a reference before measuring it, and emits
//! plot-ready CSV or JSON reports.

pub mod bloom;
pub mod hash;
pub mod range;
pub mod report;
pub mod scaling;

pub use report::{write_report, BenchError};
