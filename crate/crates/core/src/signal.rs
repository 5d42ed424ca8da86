//! Complex-baseband signal container and the primitive DSP operations used
//! throughout the transceiver model: power measurement, FIR convolution,
//! band-limited fractional delay and circular white Gaussian noise.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngSeed;

pub type C64 = Complex64;

/// A uniformly sampled complex baseband stream. Sample power is in watts
/// (`E[|x|^2]`), the rate in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBasebandSignal {
    samples: Vec<C64>,
    sample_rate: f64,
}

impl ComplexBasebandSignal {
    pub fn new(samples: Vec<C64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::Domain(format!("sample rate must be positive, got {sample_rate}")));
        }
        if samples.is_empty() {
            return Err(Error::Domain("signal must hold at least one sample".into()));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Builds a signal sharing this signal's sample rate.
    pub fn with_samples(&self, samples: Vec<C64>) -> Self {
        assert!(!samples.is_empty(), "signal must hold at least one sample");
        Self { samples, sample_rate: self.sample_rate }
    }

    pub fn zeros(len: usize, sample_rate: f64) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); len], sample_rate)
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn sample_interval(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean power over the whole buffer.
    pub fn power(&self) -> f64 {
        mean_power(&self.samples).expect("signal is never empty")
    }

    pub fn conj(&self) -> Self {
        self.map(|s| s.conj())
    }

    pub fn scaled(&self, gain: C64) -> Self {
        self.map(|s| s * gain)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        self.with_samples(self.samples.iter().map(|&s| f(s)).collect())
    }

    /// Elementwise sum. Lengths must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Elementwise difference. Lengths must agree.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Alignment(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self.with_samples(
            self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn slice(&self, range: Range<usize>) -> Self {
        self.with_samples(self.samples[range].to_vec())
    }
}

/// Mean of `|x|^2`, the signal power in watts.
pub fn measure_power(sig: &ComplexBasebandSignal) -> Result<f64> {
    mean_power(sig.samples())
}

pub fn mean_power(samples: &[C64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("cannot measure the power of an empty signal".into()));
    }
    Ok(samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64)
}

/// Peak-to-average power ratio in dB, where the peak is the given quantile
/// (in `(0, 1]`) of the instantaneous power.
pub fn papr_db(samples: &[C64], quantile: f64) -> Result<f64> {
    let avg = mean_power(samples)?;
    if avg == 0.0 {
        return Err(Error::Domain("PAPR of an all-zero signal is undefined".into()));
    }
    let mut inst: Vec<f64> = samples.iter().map(|s| s.norm_sqr()).collect();
    inst.sort_by(f64::total_cmp);
    let idx = ((quantile.clamp(0.0, 1.0) * inst.len() as f64).ceil() as usize).clamp(1, inst.len()) - 1;
    Ok(10.0 * (inst[idx] / avg).log10())
}

/// A complex FIR response with an explicit number of non-causal taps.
///
/// `taps[j]` is the response at lag `j - lead`; a causal filter has
/// `lead == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fir {
    taps: Vec<C64>,
    lead: usize,
}

impl Fir {
    pub fn causal(taps: Vec<C64>) -> Self {
        Self::with_lead(taps, 0)
    }

    pub fn with_lead(taps: Vec<C64>, lead: usize) -> Self {
        assert!(!taps.is_empty(), "FIR needs at least one tap");
        assert!(lead < taps.len(), "lead must index a tap");
        Self { taps, lead }
    }

    pub fn delta() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn scalar(c: C64) -> Self {
        Self::causal(vec![c])
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    pub fn lead(&self) -> usize {
        self.lead
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_lag(&self) -> isize {
        -(self.lead as isize)
    }

    pub fn last_lag(&self) -> isize {
        self.taps.len() as isize - 1 - self.lead as isize
    }

    /// Response at an arbitrary lag (zero outside the support).
    pub fn at(&self, lag: isize) -> C64 {
        let j = lag + self.lead as isize;
        if j < 0 || j as usize >= self.taps.len() {
            C64::new(0.0, 0.0)
        } else {
            self.taps[j as usize]
        }
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    /// Tap-wise conjugate, i.e. the response `g*(n)`.
    pub fn conj(&self) -> Self {
        Self { taps: self.taps.iter().map(|t| t.conj()).collect(), lead: self.lead }
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { taps: self.taps.iter().map(|t| t * c).collect(), lead: self.lead }
    }

    /// Cascade `self ⋆ other` (full-length convolution of the responses).
    pub fn compose(&self, other: &Fir) -> Fir {
        let mut out = vec![C64::new(0.0, 0.0); self.taps.len() + other.taps.len() - 1];
        for (i, a) in self.taps.iter().enumerate() {
            for (j, b) in other.taps.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Fir { taps: out, lead: self.lead + other.lead }
    }

    /// Lag-aligned sum of two responses.
    pub fn plus(&self, other: &Fir) -> Fir {
        self.combine(other, |a, b| a + b)
    }

    /// Lag-aligned difference of two responses.
    pub fn minus(&self, other: &Fir) -> Fir {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Fir, f: impl Fn(C64, C64) -> C64) -> Fir {
        let first = self.first_lag().min(other.first_lag());
        let last = self.last_lag().max(other.last_lag());
        let taps = (first..=last).map(|l| f(self.at(l), other.at(l))).collect();
        Fir { taps, lead: (-first) as usize }
    }

    /// Filters `x`, treating samples outside the buffer as zero. Output
    /// sample `n` is `sum_j taps[j] * x[n + lead - j]`, so a causal filter's
    /// first output is aligned with the first input.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = x.len() as isize;
        let lead = self.lead as isize;
        (0..n)
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for (j, t) in self.taps.iter().enumerate() {
                    let k = i + lead - j as isize;
                    if (0..n).contains(&k) {
                        acc += t * x[k as usize];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Linear convolution with a causal tap sequence, truncated to the input
/// length; output sample 0 is aligned with input sample 0.
pub fn convolve(sig: &ComplexBasebandSignal, fir: &[C64]) -> Result<ComplexBasebandSignal> {
    if fir.is_empty() {
        return Err(Error::Domain("FIR must have at least one tap".into()));
    }
    Ok(filter(sig, &Fir::causal(fir.to_vec())))
}

/// Applies an arbitrary (possibly non-causal) FIR response.
pub fn filter(sig: &ComplexBasebandSignal, fir: &Fir) -> ComplexBasebandSignal {
    sig.with_samples(fir.apply(sig.samples()))
}

/// Default interpolator length for [`fractional_delay`].
pub const FRACTIONAL_DELAY_TAPS: usize = 63;

/// Windowed-sinc kernel realizing a delay of `delay` samples (`|delay| < 1`).
///
/// Odd length, Blackman-Harris window centred on the delayed sinc peak, with
/// the bulk group delay removed so the kernel is centred on lag zero. The
/// taps are normalized to unit DC gain.
pub fn fractional_delay_kernel(delay: f64, n_taps: usize) -> Fir {
    assert!(n_taps % 2 == 1, "interpolator length must be odd");
    let half = (n_taps / 2) as isize;
    let span = (n_taps - 1) as f64;
    let taps = (-half..=half)
        .map(|n| {
            let t = n as f64 - delay;
            C64::new(sinc(t) * blackman_harris((t + half as f64) / span), 0.0)
        })
        .collect();
    unit_dc(taps, half as usize)
}

/// Linear-phase lowpass with cutoff `cutoff` cycles per sample, odd length,
/// centred on lag zero, unit DC gain.
pub fn lowpass_kernel(cutoff: f64, n_taps: usize) -> Fir {
    assert!(n_taps % 2 == 1, "lowpass length must be odd");
    assert!(cutoff > 0.0 && cutoff < 0.5, "cutoff must lie in (0, 0.5)");
    let half = (n_taps / 2) as isize;
    let span = (n_taps - 1) as f64;
    let taps = (-half..=half)
        .map(|n| {
            let t = n as f64;
            C64::new(sinc(2.0 * cutoff * t) * blackman_harris((t + half as f64) / span), 0.0)
        })
        .collect();
    unit_dc(taps, half as usize)
}

/// Four-term Blackman-Harris window on `u` in `[0, 1]`, zero outside.
fn blackman_harris(u: f64) -> f64 {
    let (a0, a1, a2, a3) = (0.35875, 0.48829, 0.14128, 0.01168);
    if (0.0..=1.0).contains(&u) {
        a0 - a1 * (2.0 * PI * u).cos() + a2 * (4.0 * PI * u).cos() - a3 * (6.0 * PI * u).cos()
    } else {
        0.0
    }
}

fn unit_dc(mut taps: Vec<C64>, lead: usize) -> Fir {
    let dc: C64 = taps.iter().sum();
    for t in &mut taps {
        *t /= dc;
    }
    Fir::with_lead(taps, lead)
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-12 {
        1.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

/// Delays `sig` by `delay` sample intervals with band-limited interpolation.
///
/// The integer part of the delay is applied as a zero-filled shift and the
/// remaining fraction through [`fractional_delay_kernel`].
pub fn fractional_delay(sig: &ComplexBasebandSignal, delay: f64) -> ComplexBasebandSignal {
    let whole = delay.trunc();
    let frac = delay - whole;
    let shifted = shift(sig, whole as isize);
    if frac == 0.0 {
        return shifted;
    }
    filter(&shifted, &fractional_delay_kernel(frac, FRACTIONAL_DELAY_TAPS))
}

/// Integer delay by `lag` samples (negative advances), zero-filled.
pub fn shift(sig: &ComplexBasebandSignal, lag: isize) -> ComplexBasebandSignal {
    let n = sig.len() as isize;
    let s = sig.samples();
    sig.with_samples(
        (0..n)
            .map(|i| {
                let k = i - lag;
                if (0..n).contains(&k) {
                    s[k as usize]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect(),
    )
}

/// Circular complex white Gaussian noise of the given power.
pub fn awgn(power: f64, length: usize, sample_rate: f64, seed: RngSeed) -> Result<ComplexBasebandSignal> {
    if !(power >= 0.0) {
        return Err(Error::Domain(format!("noise power must be non-negative, got {power}")));
    }
    let sigma = (power / 2.0).sqrt();
    let mut rng = seed.rng();
    let samples = (0..length)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(sigma * re, sigma * im)
        })
        .collect();
    ComplexBasebandSignal::new(samples, sample_rate)
}
