//! Experiment harness for the `kaczmarz` solvers: declarative configs,
//! seeded Monte Carlo trials, flop-axis aggregation and CSV/JSON output.

pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod presets;

pub use config::ExperimentConfig;
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, ExperimentResult};
