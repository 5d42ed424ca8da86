//! Low-noise amplifier with additive noise set by its noise figure.

use crate::error::Result;
use crate::rng::RngSeed;
use crate::signal::{awgn, ComplexBasebandSignal, C64};
use crate::units::{db_to_amplitude, db_to_lin};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnaModel {
    pub gain_db: f64,
    pub noise_figure_db: f64,
}

impl LnaModel {
    pub fn gain(&self) -> C64 {
        C64::new(db_to_amplitude(self.gain_db), 0.0)
    }

    /// Power of the noise the LNA adds at its output for a thermal input
    /// noise power `p_th` (W): `|k|^2 (F - 1) p_th`.
    pub fn added_noise_power(&self, p_th: f64) -> f64 {
        db_to_lin(self.gain_db) * (db_to_lin(self.noise_figure_db) - 1.0) * p_th
    }

    /// Output-referred noise of the LNA alone, already scaled by its gain.
    pub fn noise(&self, len: usize, sample_rate: f64, p_th: f64, seed: RngSeed) -> Result<ComplexBasebandSignal> {
        awgn(self.added_noise_power(p_th), len, sample_rate, seed)
    }
}

/// `k y + n_LNA`, where `n_LNA` tops the thermal floor `p_th` of the input up
/// to `|k|^2 F p_th`.
pub fn apply_lna(lna: &LnaModel, y: &ComplexBasebandSignal, p_th: f64, seed: RngSeed) -> Result<ComplexBasebandSignal> {
    let n = lna.noise(y.len(), y.sample_rate(), p_th, seed)?;
    y.scaled(lna.gain()).add(&n)
}
