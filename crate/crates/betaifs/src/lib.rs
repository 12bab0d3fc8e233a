//! Certificate files, CSV reports, parallel enumeration and the `betaifs`
//! command line on top of `betaifs-core`.

pub mod cert;
pub mod cli;
pub mod inputs;
pub mod parallel;
pub mod report;

pub use betaifs_core as core;
