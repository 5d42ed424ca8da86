//! System-level parameters of the full-duplex transceiver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar link parameters. Powers in dBm, gains and ratios in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParameters {
    /// Hz.
    pub bandwidth: f64,
    pub thermal_floor: f64,
    pub noise_figure: f64,
    pub snr_requirement: f64,
    pub sensitivity: f64,
    pub soi_power: f64,
    pub tx_power: f64,
    pub pa_gain: f64,
    pub pa_iip3: f64,
    pub antenna_attenuation: f64,
    pub rf_cancellation: f64,
    pub lna_gain: f64,
    pub mixer_gain: f64,
    pub irr_tx: f64,
    pub irr_rx: f64,
    pub adc_bits: u32,
    /// Volts.
    pub adc_vpp: f64,
    pub papr: f64,
}

impl Default for SystemParameters {
    fn default() -> Self {
        Self {
            bandwidth: 12.5e6,
            thermal_floor: -103.0,
            noise_figure: 4.1,
            snr_requirement: 10.0,
            sensitivity: -88.9,
            soi_power: -83.9,
            tx_power: 15.0,
            pa_gain: 27.0,
            pa_iip3: 20.0,
            antenna_attenuation: 40.0,
            rf_cancellation: 30.0,
            lna_gain: 25.0,
            mixer_gain: 6.0,
            irr_tx: 25.0,
            irr_rx: 25.0,
            adc_bits: 12,
            adc_vpp: 4.5,
            papr: 10.0,
        }
    }
}

impl SystemParameters {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("thermal_floor", self.thermal_floor),
            ("noise_figure", self.noise_figure),
            ("snr_requirement", self.snr_requirement),
            ("sensitivity", self.sensitivity),
            ("soi_power", self.soi_power),
            ("tx_power", self.tx_power),
            ("pa_gain", self.pa_gain),
            ("antenna_attenuation", self.antenna_attenuation),
            ("rf_cancellation", self.rf_cancellation),
            ("lna_gain", self.lna_gain),
            ("mixer_gain", self.mixer_gain),
            ("papr", self.papr),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        // IIP3 and IRR may be +inf to switch the impairment off.
        for (name, v) in [("pa_iip3", self.pa_iip3), ("irr_tx", self.irr_tx), ("irr_rx", self.irr_rx)] {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(Error::Config(format!("{name} must be finite or +inf, got {v}")));
            }
        }
        if self.irr_tx <= 0.0 || self.irr_rx <= 0.0 {
            return Err(Error::Config("IRR must be positive".into()));
        }
        if self.noise_figure < 0.0 {
            return Err(Error::Config("noise figure cannot be negative".into()));
        }
        if !(self.bandwidth > 0.0) || !(self.adc_vpp > 0.0) || self.adc_bits == 0 {
            return Err(Error::Config("bandwidth, ADC range and ADC bits must be positive".into()));
        }
        let implied = self.thermal_floor + self.noise_figure + self.snr_requirement;
        if (implied - self.sensitivity).abs() > 0.05 {
            return Err(Error::Config(format!(
                "sensitivity {} dBm disagrees with floor + NF + SNR = {implied:.2} dBm",
                self.sensitivity
            )));
        }
        Ok(())
    }

    /// Power of the DAC output `x` for the configured PA output power, dBm.
    pub fn dac_power_dbm(&self) -> f64 {
        self.tx_power - self.pa_gain - self.mixer_gain
    }

    /// Power at the PA input, dBm.
    pub fn pa_input_dbm(&self) -> f64 {
        self.tx_power - self.pa_gain
    }

    pub fn with_tx_power(&self, tx_power: f64) -> Self {
        Self { tx_power, ..self.clone() }
    }
}
