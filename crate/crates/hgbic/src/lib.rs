//! File formats, configuration, a parallel simulation runner and the
//! command-line tool built on `hgbic-core`.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod report;
pub mod runner;
