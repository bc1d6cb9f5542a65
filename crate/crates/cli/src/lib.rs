//! Library side of the verification harness: suite runners, report
//! rendering, config parsing and geometry emitters. The `fatcw` binary is a
//! thin wrapper over these.

pub mod config;
pub mod emit;
pub mod report;
pub mod suites;
