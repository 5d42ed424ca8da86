//! Configuration, experiment orchestration and result files.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{ExperimentConfig, PRESETS};
pub use experiment::{run_mn_grid, run_tx_power_sweep, GridResult, TxSweepResult};
