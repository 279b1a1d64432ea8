//! Experiment harness, invariant-check suites and file formats around
//! `thermoreg-core`.
//!
//! The library half of this crate exists so the integration and acceptance
//! tests can drive exactly the code the binary runs: [`experiments`] holds
//! the seeded Euclidean-vs-Fisher–Rao comparison runs, [`checks`] the
//! numerical property suites (including the geodesic boundary-value oracle
//! that cross-checks the closed-form distance), and [`config`] the JSON
//! experiment configuration.

pub mod checks;
pub mod config;
pub mod error;
pub mod experiments;

pub use error::{CliError, ExitCode};
