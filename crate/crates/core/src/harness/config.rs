//! Experiment configuration and the shipped scenario presets.

use serde::{Deserialize, Serialize};

use crate::bias::BiasSignal;
use crate::budget::LdcPolicy;
use crate::error::{Error, Result};
use crate::impairments::chain::ChainOptions;
use crate::ofdm::OfdmConfig;
use crate::params::SystemParameters;

pub const PRESETS: [&str; 3] = ["baseline", "low-isolation", "altered-budget"];

/// Transmit-power sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TxSweep {
    pub tx_dbm: Vec<f64>,
    pub training: usize,
    pub evaluation: usize,
    pub taps: usize,
    pub precursor: usize,
}

impl Default for TxSweep {
    fn default() -> Self {
        Self {
            tx_dbm: (0..16).map(|i| -5.0 + 2.0 * i as f64).collect(),
            training: 5000,
            evaluation: 5000,
            taps: 5,
            precursor: 1,
        }
    }
}

/// Training-length and filter-length grid at a fixed transmit power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MnGrid {
    pub tx_dbm: f64,
    pub taps: Vec<usize>,
    pub training: Vec<usize>,
    pub evaluation: usize,
    pub precursor: usize,
}

/// `n` integers logarithmically spaced from `lo` to `hi`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<usize> {
    if n == 1 {
        return vec![lo.round() as usize];
    }
    (0..n).map(|i| (lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).round() as usize).collect()
}

impl Default for MnGrid {
    fn default() -> Self {
        Self { tx_dbm: 15.0, taps: vec![2, 3, 4, 5], training: logspace(50.0, 20000.0, 10), evaluation: 5000, precursor: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiasRun {
    pub samples: usize,
    pub trials: usize,
    pub signal: BiasSignal,
}

impl Default for BiasRun {
    fn default() -> Self {
        Self { samples: 5000, trials: 500, signal: BiasSignal::Gaussian }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub seed: u64,
    pub realizations: usize,
    pub output_dir: String,
    pub system: SystemParameters,
    pub ofdm: OfdmConfig,
    pub chain: ChainOptions,
    pub ldc: LdcPolicy,
    /// Budget sweep points, dBm.
    pub budget_tx_dbm: Vec<f64>,
    pub sweep_tx: TxSweep,
    pub grid: MnGrid,
    pub bias: BiasRun,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: "baseline".into(),
            seed: 1,
            realizations: 100,
            output_dir: "out".into(),
            system: SystemParameters::default(),
            ofdm: OfdmConfig::default(),
            chain: ChainOptions::default(),
            ldc: LdcPolicy::default(),
            budget_tx_dbm: (0..=30).map(|i| -5.0 + i as f64).collect(),
            sweep_tx: TxSweep::default(),
            grid: MnGrid::default(),
            bias: BiasRun::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::default();
        let system = match name {
            "baseline" => base.system.clone(),
            "low-isolation" => SystemParameters { antenna_attenuation: 30.0, rf_cancellation: 20.0, ..base.system.clone() },
            "altered-budget" => SystemParameters {
                antenna_attenuation: 30.0,
                rf_cancellation: 20.0,
                irr_tx: 35.0,
                irr_rx: 35.0,
                ..base.system.clone()
            },
            _ => {
                return Err(Error::Config(format!("unknown preset '{name}', expected one of {}", PRESETS.join(", "))))
            }
        };
        Ok(Self { scenario: name.into(), system, ..base })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.ofdm.validate()?;
        if self.realizations == 0 {
            return Err(Error::Config("at least one realization is needed".into()));
        }
        if self.budget_tx_dbm.is_empty() || self.sweep_tx.tx_dbm.is_empty() {
            return Err(Error::Config("transmit power sweep is empty".into()));
        }
        if self.grid.taps.is_empty() || self.grid.training.is_empty() {
            return Err(Error::Config("M/N grid is empty".into()));
        }
        let all_tx = self.budget_tx_dbm.iter().chain(&self.sweep_tx.tx_dbm).chain([&self.grid.tx_dbm]);
        if all_tx.into_iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("transmit powers must be finite".into()));
        }
        if self.sweep_tx.evaluation == 0 || self.grid.evaluation == 0 {
            return Err(Error::Config("evaluation length must be positive".into()));
        }
        if !(self.chain.rf_delay_error.abs() < 1.0) {
            return Err(Error::Config("RF delay error must be below one sample".into()));
        }
        Ok(())
    }
}
