//! Example generators, run configuration, reports and the command-line driver.

pub mod config;
pub mod generators;
pub mod groups;
pub mod reports;
pub mod runner;

pub use config::RunConfig;
pub use generators::{cnot, gen_skewed_certificate, perturbed};
pub use groups::{gen_group_kt, GroupTable};
pub use reports::{Expect, ReportFile};
