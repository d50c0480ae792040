//! Experiment harness: configs, scenario presets, parallel seeded runs and
//! CSV metrics.

pub mod config;
pub mod presets;
pub mod report;
pub mod runner;

use std::path::PathBuf;

pub use config::ExperimentConfig;
pub use runner::{run_all, RunResult};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),

    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),

    #[error(transparent)]
    Core(#[from] swapcomb_core::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("run T={horizon} seed={seed}: {source}")]
    Run {
        horizon: u64,
        seed: u64,
        #[source]
        source: Box<BenchError>,
    },
}
