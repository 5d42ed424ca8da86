//! Oversampled CP-OFDM waveform generator.

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::signal::{filter, lowpass_kernel, ComplexBasebandSignal, C64};

/// Frame layout. Defaults follow a WLAN-like 64-subcarrier numerology at
/// 4x oversampling (64 MHz sampling, 250 kHz subcarrier spacing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmConfig {
    /// Square QAM order (4, 16, 64, ...).
    pub qam_order: u32,
    pub n_subcarriers: usize,
    pub n_data_subcarriers: usize,
    /// Cyclic prefix length as a fraction of the useful symbol.
    pub guard_fraction: f64,
    /// Seconds.
    pub sample_interval: f64,
    /// Useful (FFT) part of the symbol, seconds.
    pub symbol_length: f64,
    pub oversampling: usize,
    /// Length of the transmit lowpass applied by [`ofdm_waveform`]; zero
    /// disables it.
    pub tx_filter_taps: usize,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            qam_order: 16,
            n_subcarriers: 64,
            n_data_subcarriers: 48,
            guard_fraction: 0.25,
            sample_interval: 15.625e-9,
            symbol_length: 4e-6,
            oversampling: 4,
            tx_filter_taps: 255,
        }
    }
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let side = (self.qam_order as f64).sqrt().round() as u32;
        if self.qam_order < 4 || side * side != self.qam_order || !side.is_power_of_two() {
            return bad(format!("QAM order {} is not a square power of four", self.qam_order));
        }
        if self.n_data_subcarriers == 0 || self.n_data_subcarriers > self.n_subcarriers {
            return bad(format!(
                "{} data subcarriers do not fit in {} subcarriers",
                self.n_data_subcarriers, self.n_subcarriers
            ));
        }
        if self.n_data_subcarriers % 2 != 0 || self.n_data_subcarriers / 2 >= self.n_subcarriers / 2 {
            return bad("data subcarriers must sit symmetrically around a null DC bin".into());
        }
        if self.tx_filter_taps != 0 && self.tx_filter_taps % 2 == 0 {
            return bad("transmit filter length must be odd".into());
        }
        if self.oversampling == 0 {
            return bad("oversampling factor must be at least 1".into());
        }
        if !(self.sample_interval > 0.0) {
            return bad("sample interval must be positive".into());
        }
        if !(0.0..1.0).contains(&self.guard_fraction) {
            return bad("guard fraction must lie in [0, 1)".into());
        }
        let prefix = self.fft_size() as f64 * self.guard_fraction;
        if (prefix - prefix.round()).abs() > 1e-9 {
            return bad(format!("guard fraction gives a non-integer prefix of {prefix} samples"));
        }
        let useful = self.fft_size() as f64 * self.sample_interval;
        if (useful - self.symbol_length).abs() > self.sample_interval {
            return bad(format!(
                "symbol length {:.4e} s disagrees with {} samples of {:.4e} s",
                self.symbol_length,
                self.fft_size(),
                self.sample_interval
            ));
        }
        Ok(())
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.sample_interval
    }

    pub fn fft_size(&self) -> usize {
        self.n_subcarriers * self.oversampling
    }

    pub fn prefix_samples(&self) -> usize {
        (self.fft_size() as f64 * self.guard_fraction).round() as usize
    }

    /// Samples per symbol including the cyclic prefix.
    pub fn symbol_samples(&self) -> usize {
        self.fft_size() + self.prefix_samples()
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.sample_rate() / self.fft_size() as f64
    }

    /// Cutoff of the transmit lowpass, cycles per sample: midway between
    /// the outermost data subcarrier and the channel edge, so the transition
    /// band falls on the guard subcarriers.
    pub fn tx_filter_cutoff(&self) -> f64 {
        let data_edge = (self.n_data_subcarriers as f64 / 2.0 + 0.5) / self.fft_size() as f64;
        let channel_edge = 0.5 / self.oversampling as f64;
        0.5 * (data_edge + channel_edge)
    }

    /// FFT bins carrying data: `1..=D/2` and their negative mirrors.
    pub fn data_bins(&self) -> Vec<usize> {
        let half = self.n_data_subcarriers / 2;
        let n = self.fft_size();
        (1..=half).chain((1..=half).map(|k| n - k)).collect()
    }
}

/// Generates `n_symbols` OFDM symbols with cyclic prefix, scaled so the
/// frame's mean power equals `target_power` watts.
pub fn generate_ofdm_frame(
    cfg: &OfdmConfig,
    n_symbols: usize,
    target_power: f64,
    seed: RngSeed,
) -> Result<ComplexBasebandSignal> {
    cfg.validate()?;
    if n_symbols == 0 {
        return Err(Error::Domain("at least one OFDM symbol is required".into()));
    }
    if !(target_power > 0.0 && target_power.is_finite()) {
        return Err(Error::Domain(format!("target power must be positive, got {target_power}")));
    }
    let n = cfg.fft_size();
    let cp = cfg.prefix_samples();
    let side = (cfg.qam_order as f64).sqrt().round() as i32;
    let bins = cfg.data_bins();
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let mut rng = seed.rng();

    let mut out = Vec::with_capacity(n_symbols * (n + cp));
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for _ in 0..n_symbols {
        buf.fill(C64::new(0.0, 0.0));
        for &b in &bins {
            let i = 2 * rng.random_range(0..side) - (side - 1);
            let q = 2 * rng.random_range(0..side) - (side - 1);
            buf[b] = Complex64::new(i as f64, q as f64);
        }
        ifft.process(&mut buf);
        out.extend_from_slice(&buf[n - cp..]);
        out.extend_from_slice(&buf);
    }

    let p = out.iter().map(|s| s.norm_sqr()).sum::<f64>() / out.len() as f64;
    let g = (target_power / p).sqrt();
    out.iter_mut().for_each(|s| *s *= g);
    ComplexBasebandSignal::new(out, cfg.sample_rate())
}

/// An OFDM stream of exactly `len` samples at `target_power`.
///
/// Whole symbols are generated and passed through the transmit lowpass,
/// which suppresses the spectral splatter of the symbol transitions; the
/// filter transients are cut off and the result renormalized.
pub fn ofdm_waveform(cfg: &OfdmConfig, len: usize, target_power: f64, seed: RngSeed) -> Result<ComplexBasebandSignal> {
    if len == 0 {
        return Err(Error::Domain("waveform length must be positive".into()));
    }
    let edge = cfg.tx_filter_taps / 2;
    let symbols = (len + 2 * edge).div_ceil(cfg.symbol_samples());
    let frame = generate_ofdm_frame(cfg, symbols, target_power, seed)?;
    let shaped = if cfg.tx_filter_taps == 0 {
        frame
    } else {
        filter(&frame, &lowpass_kernel(cfg.tx_filter_cutoff(), cfg.tx_filter_taps))
    };
    let cut = shaped.slice(edge..edge + len);
    let g = (target_power / cut.power()).sqrt();
    Ok(cut.scaled(C64::new(g, 0.0)))
}
