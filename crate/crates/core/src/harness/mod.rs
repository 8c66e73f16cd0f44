//! Benchmark driver, best-known-solution registry, result reporting, the
//! command line and the reference oracles used by the tests.

pub mod bks;
pub mod cli;
pub mod oracle;
pub mod report;
pub mod verify;
