//! Bias of the widely-linear LS estimator caused by PA intermodulation.
//!
//! In a frequency-flat chain the received SI is
//! `y = h1 x + h2 x* + h_IMD x_IMD + u`, with `x_IMD` the cubic term of the
//! TX mixer output. The single-tap estimator treats `h_IMD x_IMD` as noise,
//! but it correlates with `x` and `x*`, so the estimate is pulled away from
//! `(h1, h2)` by a fixed amount.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cancel::{build_augmented_matrix, estimate_wl_ls};
use crate::error::{Error, Result};
use crate::impairments::chain::ChainOptions;
use crate::impairments::chain::Transceiver;
use crate::ofdm::{ofdm_waveform, OfdmConfig};
use crate::params::SystemParameters;
use crate::rng::RngSeed;
use crate::signal::{awgn, ComplexBasebandSignal, C64};
use crate::units::{db_to_amplitude, dbm_to_w};

/// Second and fourth moments of the transmit data, `r = E|x|^2`,
/// `m4 = E|x|^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalMoments {
    pub r: f64,
    pub m4: f64,
}

impl SignalMoments {
    /// Circular complex Gaussian of power `r`.
    pub fn gaussian(r: f64) -> Self {
        Self { r, m4: 2.0 * r * r }
    }

    pub fn measure(x: &[C64]) -> Self {
        let n = x.len() as f64;
        let r = x.iter().map(|s| s.norm_sqr()).sum::<f64>() / n;
        let m4 = x.iter().map(|s| s.norm_sqr().powi(2)).sum::<f64>() / n;
        Self { r, m4 }
    }
}

/// Scalar (single-tap) equivalent of the chain from `x` to the ADC input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatModel {
    pub h1: C64,
    pub h2: C64,
    pub h_imd: C64,
    pub g1_tx: C64,
    pub g2_tx: C64,
    /// Noise power at the ADC input, W.
    pub noise_power: f64,
    /// Power of `x`, W.
    pub tx_data_power: f64,
}

/// Phase of the residual coupling after RF cancellation in the flat model.
const COUPLING_PHASE: f64 = 0.7;

impl FlatModel {
    pub fn from_params(p: &SystemParameters) -> Result<Self> {
        let radio = Transceiver::from_params(p, &ChainOptions::default())?;
        let (g1t, g2t) = radio.tx_iq.flat();
        let (g1r, g2r) = radio.rx_iq.flat();
        let k = radio.lna.gain();
        let coupling = C64::from_polar(db_to_amplitude(-p.antenna_attenuation - p.rf_cancellation), COUPLING_PHASE);
        let lin = k * coupling * radio.pa.alpha0;
        let noise_power = radio.lna.gain().norm_sqr()
            * crate::units::db_to_lin(p.noise_figure)
            * radio.thermal_noise
            * (g1r.norm_sqr() + g2r.norm_sqr());
        Ok(Self {
            h1: lin * g1r * g1t + (lin * g2t).conj() * g2r,
            h2: lin * g1r * g2t + (lin * g1t).conj() * g2r,
            h_imd: k * coupling * radio.pa.alpha1 * g1r,
            g1_tx: g1t,
            g2_tx: g2t,
            noise_power,
            tx_data_power: dbm_to_w(p.dac_power_dbm()),
        })
    }

    /// `x_IMD` for the TX mixer output of `x`.
    pub fn imd_basis(&self, x: &[C64]) -> Vec<C64> {
        x.iter()
            .map(|s| {
                let m = self.g1_tx * s + self.g2_tx * s.conj();
                m * m.norm_sqr()
            })
            .collect()
    }

    fn observe(&self, x: &ComplexBasebandSignal, noise_seed: RngSeed) -> Result<ComplexBasebandSignal> {
        let u = awgn(self.noise_power, x.len(), x.sample_rate(), noise_seed)?;
        let imd = self.imd_basis(x.samples());
        Ok(x.with_samples(
            x.samples()
                .iter()
                .zip(&imd)
                .zip(u.samples())
                .map(|((s, d), n)| self.h1 * s + self.h2 * s.conj() + self.h_imd * d + n)
                .collect(),
        ))
    }
}

/// The simplified bias vector
/// `h_IMD |g1T|^2 m4 / r * [g1T, 2 g2T]`.
pub fn analytic_bias(params: &SystemParameters, moments: SignalMoments) -> Result<[C64; 2]> {
    if !(moments.r > 0.0) {
        return Err(Error::Domain("signal power must be positive".into()));
    }
    let m = FlatModel::from_params(params)?;
    let s = m.h_imd * m.g1_tx.norm_sqr() * moments.m4 / moments.r;
    Ok([s * m.g1_tx, s * 2.0 * m.g2_tx])
}

/// Bias without dropping the `|g2T|^2` terms:
/// `h_IMD m4 / r * [g1T (|g1T|^2 + 2|g2T|^2), g2T (2|g1T|^2 + |g2T|^2)]`.
pub fn analytic_bias_exact(params: &SystemParameters, moments: SignalMoments) -> Result<[C64; 2]> {
    if !(moments.r > 0.0) {
        return Err(Error::Domain("signal power must be positive".into()));
    }
    let m = FlatModel::from_params(params)?;
    let (a, b) = (m.g1_tx.norm_sqr(), m.g2_tx.norm_sqr());
    let s = m.h_imd * moments.m4 / moments.r;
    Ok([s * m.g1_tx * (a + 2.0 * b), s * m.g2_tx * (2.0 * a + b)])
}

/// Transmit data used in the Monte-Carlo trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasSignal {
    Gaussian,
    Ofdm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub analytic_bias: [C64; 2],
    /// Mean of `[h1_hat - h1, h2_hat - h2]` over the trials.
    pub empirical_mean_error: Vec<C64>,
    /// Standard error of each mean component (complex magnitude).
    pub standard_error: Vec<f64>,
    pub n_trials: usize,
    /// `|empirical - analytic| / |analytic|` over the stacked vector.
    pub agreement: f64,
    pub moments: SignalMoments,
    pub signal: BiasSignal,
}

impl BiasReport {
    /// True when every component of the mean error lies within `sigmas`
    /// standard errors of zero.
    pub fn consistent_with_zero(&self, sigmas: f64) -> bool {
        self.empirical_mean_error.iter().zip(&self.standard_error).all(|(m, s)| m.norm() <= sigmas * s)
    }
}

/// Runs `n_trials` independent single-tap WL estimations of `n` samples on
/// the flat model and compares the mean error with [`analytic_bias`].
pub fn monte_carlo_bias(
    params: &SystemParameters,
    n: usize,
    n_trials: usize,
    seed: RngSeed,
    signal: BiasSignal,
) -> Result<BiasReport> {
    if n_trials < 2 {
        return Err(Error::Config("at least two trials are needed".into()));
    }
    let model = FlatModel::from_params(params)?;
    let ofdm = OfdmConfig::default();
    let make_x = |s: RngSeed, len: usize| -> Result<ComplexBasebandSignal> {
        match signal {
            BiasSignal::Gaussian => awgn(model.tx_data_power, len, ofdm.sample_rate(), s),
            BiasSignal::Ofdm => ofdm_waveform(&ofdm, len, model.tx_data_power, s),
        }
    };
    let moments = match signal {
        BiasSignal::Gaussian => SignalMoments::gaussian(model.tx_data_power),
        BiasSignal::Ofdm => SignalMoments::measure(make_x(seed.derive(9, 0), 1 << 18)?.samples()),
    };

    let errors: Vec<[C64; 2]> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| -> Result<[C64; 2]> {
            let x = make_x(seed.derive(1, i), n)?;
            let y = model.observe(&x, seed.derive(2, i))?;
            let est = estimate_wl_ls(&build_augmented_matrix(&x, &y, 1, 0)?)?;
            Ok([est.h1[0] - model.h1, est.h2[0] - model.h2])
        })
        .collect::<Result<_>>()?;

    let t = n_trials as f64;
    let mut mean = [C64::new(0.0, 0.0); 2];
    for e in &errors {
        mean[0] += e[0];
        mean[1] += e[1];
    }
    mean[0] /= t;
    mean[1] /= t;
    let mut var = [0.0; 2];
    for e in &errors {
        var[0] += (e[0] - mean[0]).norm_sqr();
        var[1] += (e[1] - mean[1]).norm_sqr();
    }
    let se: Vec<f64> = var.iter().map(|v| (v / (t - 1.0) / t).sqrt()).collect();

    let analytic = analytic_bias(params, moments)?;
    let num = ((mean[0] - analytic[0]).norm_sqr() + (mean[1] - analytic[1]).norm_sqr()).sqrt();
    let den = (analytic[0].norm_sqr() + analytic[1].norm_sqr()).sqrt();
    let agreement = if den > 0.0 { num / den } else { f64::INFINITY };
    Ok(BiasReport {
        analytic_bias: analytic,
        empirical_mean_error: mean.to_vec(),
        standard_error: se,
        n_trials,
        agreement,
        moments,
        signal,
    })
}

/// Fourth-order circularity statistics `|E[x^4]| / r^2` and
/// `|E[x^3 x*]| / r^2`.
pub fn fourth_order_circularity(x: &[C64]) -> (f64, f64) {
    let n = x.len() as f64;
    let r = x.iter().map(|s| s.norm_sqr()).sum::<f64>() / n;
    let m40: C64 = x.iter().map(|s| s.powi(4)).sum::<C64>() / n;
    let m31: C64 = x.iter().map(|s| s.powi(3) * s.conj()).sum::<C64>() / n;
    (m40.norm() / (r * r), m31.norm() / (r * r))
}
