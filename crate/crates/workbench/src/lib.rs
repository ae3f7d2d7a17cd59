//! Std companion of `workbench-core`: text and JSON formats, reports,
//! parallel verification suites and the `workbench` command line.

pub mod cli;
pub mod error;
pub mod fiformat;
pub mod report;
pub mod suite;
pub mod text;

pub use error::CliError;
