//! Hammerstein power amplifier: cubic static nonlinearity followed by a
//! linear memory filter.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal::{ComplexBasebandSignal, Fir, C64};
use crate::units::{db_to_amplitude, dbm_to_w, lin_to_db};

#[derive(Debug, Clone, PartialEq)]
pub struct PaModel {
    pub alpha0: C64,
    /// Third-order coefficient, 1/W.
    pub alpha1: C64,
    pub memory: Fir,
}

/// Output of the PA split into its linear and intermodulation branches.
#[derive(Debug, Clone)]
pub struct PaOutput {
    pub linear: ComplexBasebandSignal,
    pub imd: ComplexBasebandSignal,
}

impl PaOutput {
    pub fn total(&self) -> ComplexBasebandSignal {
        self.linear.add(&self.imd).expect("branches share a length")
    }
}

impl PaModel {
    pub fn linear(gain_db: f64) -> Self {
        Self {
            alpha0: C64::new(db_to_amplitude(gain_db), 0.0),
            alpha1: C64::new(0.0, 0.0),
            memory: Fir::delta(),
        }
    }

    /// The short lowpass used for memory experiments, normalized to unit
    /// energy.
    pub fn memory_lowpass() -> Fir {
        let taps = [0.98, 0.1, -0.05];
        let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
        Fir::causal(taps.iter().map(|t| C64::new(t / norm, 0.0)).collect())
    }

    pub fn apply(&self, x: &ComplexBasebandSignal) -> ComplexBasebandSignal {
        self.apply_split(x).total()
    }

    /// Filters `alpha0 * x` and `alpha1 * x|x|^2` separately.
    pub fn apply_split(&self, x: &ComplexBasebandSignal) -> PaOutput {
        let lin: Vec<C64> = x.samples().iter().map(|s| s * self.alpha0).collect();
        let imd: Vec<C64> = imd_term(x.samples()).into_iter().map(|s| s * self.alpha1).collect();
        PaOutput {
            linear: x.with_samples(self.memory.apply(&lin)),
            imd: x.with_samples(self.memory.apply(&imd)),
        }
    }

    /// Input-referred third-order intercept measured with a two-tone test at
    /// `tone_power_w` per tone, W. Infinite for a linear PA.
    pub fn measure_iip3(&self, tone_power_w: f64) -> f64 {
        let (fund, im3) = self.two_tone(tone_power_w);
        if im3 == 0.0 {
            return f64::INFINITY;
        }
        tone_power_w * (fund / im3).sqrt()
    }

    /// Output powers (W) of the lower fundamental and the lower IM3 product
    /// for two equal tones of `tone_power_w` each.
    pub fn two_tone(&self, tone_power_w: f64) -> (f64, f64) {
        const N: usize = 1024;
        const K1: i64 = 40;
        const K2: i64 = 56;
        let amp = tone_power_w.sqrt();
        let x: Vec<C64> = (0..N)
            .map(|n| {
                let w = 2.0 * PI * n as f64 / N as f64;
                C64::from_polar(amp, w * K1 as f64) + C64::from_polar(amp, w * K2 as f64)
            })
            .collect();
        // Periodic extension so the memory filter sees a steady state.
        let span = self.memory.len();
        let mut ext = x[N - span..].to_vec();
        ext.extend_from_slice(&x);
        ext.extend_from_slice(&x[..span]);
        let sig = ComplexBasebandSignal::new(ext, 1.0).expect("non-empty");
        let y = self.apply(&sig);
        let y = &y.samples()[span..span + N];
        (dft_bin_power(y, K1), dft_bin_power(y, 2 * K1 - K2))
    }
}

/// `x |x|^2`, the third-order intermodulation basis.
pub fn imd_term(x: &[C64]) -> Vec<C64> {
    x.iter().map(|s| s * s.norm_sqr()).collect()
}

fn dft_bin_power(x: &[C64], bin: i64) -> f64 {
    let n = x.len() as f64;
    let acc: C64 = x
        .iter()
        .enumerate()
        .map(|(k, s)| s * C64::from_polar(1.0, -2.0 * PI * bin as f64 * k as f64 / n))
        .sum();
    (acc / n).norm_sqr()
}

/// Builds a PA with power gain `gain_db` whose input-referred IIP3 equals
/// `iip3_dbm`. The cubic coefficient is compressive (opposite phase to the
/// linear gain) and is refined by two-tone measurement until the intercept
/// matches within 0.01 dB.
pub fn calibrate_pa(gain_db: f64, iip3_dbm: f64, memory: Option<Fir>) -> Result<PaModel> {
    if !(gain_db > 0.0) || !gain_db.is_finite() {
        return Err(Error::Domain(format!("PA gain must be positive, got {gain_db} dB")));
    }
    if iip3_dbm.is_nan() || iip3_dbm == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("IIP3 must be finite or +inf, got {iip3_dbm}")));
    }
    let mut pa = PaModel::linear(gain_db);
    if let Some(f) = memory {
        pa.memory = f;
    }
    if iip3_dbm == f64::INFINITY {
        return Ok(pa);
    }
    let target = dbm_to_w(iip3_dbm);
    // Small-signal start: the tones' linear and cubic outputs meet where
    // |alpha1| P = |alpha0|.
    pa.alpha1 = -pa.alpha0 / target;
    // Measure well below compression, 30 dB under the intercept.
    let probe = target * 1e-3;
    for _ in 0..50 {
        let measured = pa.measure_iip3(probe);
        if lin_to_db(measured / target).abs() < 0.01 {
            return Ok(pa);
        }
        pa.alpha1 *= measured / target;
    }
    Err(Error::Domain("PA calibration did not converge".into()))
}

/// Hammerstein output `f ⋆ (alpha0 x + alpha1 x|x|^2)`.
pub fn apply_pa(pa: &PaModel, x: &ComplexBasebandSignal) -> ComplexBasebandSignal {
    pa.apply(x)
}
