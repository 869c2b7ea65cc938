//! Experiment runner for faulty-oracle robustification: configuration,
//! seeded parallel trials, CSV/JSON results and the `noisy-oracle` CLI.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod format;
pub mod harness;
pub mod output;
