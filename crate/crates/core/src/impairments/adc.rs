//! Automatic gain control and uniform I/Q quantization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ComplexBasebandSignal, C64};
use crate::units::{db_to_lin, lin_to_db};

/// How the AGC picks the VGA gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AgcMode {
    /// Largest I or Q magnitude of the buffer maps to full scale; nothing
    /// clips.
    #[default]
    Peak,
    /// Per-rail RMS sits `papr_db` below full scale; excursions beyond are
    /// saturated.
    Papr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcModel {
    /// `None` disables quantization.
    pub bits: Option<u32>,
    pub peak_to_peak_voltage: f64,
    pub papr_db: f64,
    pub agc: AgcMode,
}

#[derive(Debug, Clone)]
pub struct AdcOutput {
    /// Quantized samples, volts.
    pub samples: ComplexBasebandSignal,
    /// Real VGA gain chosen by the AGC.
    pub vga_gain: f64,
}

impl AdcOutput {
    /// Quantized samples referred back to the ADC input scale.
    pub fn normalized(&self) -> ComplexBasebandSignal {
        self.samples.scaled(C64::new(1.0 / self.vga_gain, 0.0))
    }
}

impl AdcModel {
    pub fn full_scale(&self) -> f64 {
        self.peak_to_peak_voltage / 2.0
    }

    /// Design SNR of the converter, dB.
    pub fn snr_db(&self) -> f64 {
        match self.bits {
            Some(b) => snr_adc_db(b, self.papr_db),
            None => f64::INFINITY,
        }
    }

    fn agc_gain(&self, y: &ComplexBasebandSignal) -> Result<f64> {
        let p = y.power();
        if !(p > 0.0) {
            return Err(Error::Domain("AGC is undefined for a zero-power input".into()));
        }
        let a = self.full_scale();
        Ok(match self.agc {
            AgcMode::Peak => a / peak_rail(y.samples()),
            AgcMode::Papr => a / (db_to_lin(self.papr_db) * p / 2.0).sqrt(),
        })
    }

    fn quantize(&self, v: f64) -> f64 {
        let Some(bits) = self.bits else { return v };
        let a = self.full_scale();
        let levels = 2f64.powi(bits as i32);
        let step = 2.0 * a / levels;
        let idx = (v / step).floor().clamp(-levels / 2.0, levels / 2.0 - 1.0);
        (idx + 0.5) * step
    }
}

/// `6.02 b + 4.76 - PAPR` in dB.
pub fn snr_adc_db(bits: u32, papr_db: f64) -> f64 {
    6.02 * bits as f64 + 4.76 - papr_db
}

/// Largest absolute I or Q value.
pub fn peak_rail(x: &[C64]) -> f64 {
    x.iter().map(|s| s.re.abs().max(s.im.abs())).fold(0.0, f64::max)
}

/// Ratio of full scale squared to per-rail power when the buffer peak is
/// mapped to full scale, dB. This is the loading the peak AGC realizes.
pub fn peak_headroom_db(x: &[C64]) -> f64 {
    let p = x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64;
    lin_to_db(peak_rail(x).powi(2) / (p / 2.0))
}

/// Scales `y` onto the converter range and quantizes I and Q with a
/// saturating mid-rise quantizer.
pub fn apply_agc_adc(adc: &AdcModel, y: &ComplexBasebandSignal) -> Result<AdcOutput> {
    let k = adc.agc_gain(y)?;
    let q = y.map(|s| C64::new(adc.quantize(s.re * k), adc.quantize(s.im * k)));
    Ok(AdcOutput { samples: q, vga_gain: k })
}
