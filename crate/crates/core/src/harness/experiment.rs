//! Monte-Carlo experiments: transmit-power sweep and training-size grid.
//!
//! Each realization draws a coupling channel, calibrates the RF canceller on
//! the training burst, trains the digital cancellers without the signal of
//! interest and evaluates the frozen coefficients on a fresh burst that
//! carries it.
//!
//! Seeds: realization `r` uses `base.derive(stream, r)` with one stream per
//! random source (see the `STREAM_*` constants). Seeds do not depend on the
//! sweep point, so every point sees the same channels and data.

use rayon::prelude::*;
use serde::Serialize;

use crate::cancel::{build_augmented_matrix, estimate_linear_ls, estimate_wl_ls, measure_sinr, ChannelEstimate};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::impairments::chain::{ChainComponents, ImpairmentChain, Transceiver};
use crate::impairments::channel::draw_coupling_channel;
use crate::impairments::rf::{best_rf_canceller, calibrate_rf_canceller, expected_rf_floor_db};
use crate::ofdm::ofdm_waveform;
use crate::params::SystemParameters;
use crate::rng::RngSeed;
use crate::signal::{shift, ComplexBasebandSignal, C64};
use crate::units::{dbm_to_w, lin_to_db, w_to_dbm};

/// Samples discarded on each side of a burst so filter edges never enter
/// training or evaluation.
pub const GUARD: usize = 64;
/// Largest integer lag searched when aligning `y` to `x`.
pub const MAX_LAG: isize = 8;

pub const STREAM_CHANNEL: u64 = 1;
pub const STREAM_TRAIN_DATA: u64 = 2;
pub const STREAM_TRAIN_NOISE: u64 = 3;
pub const STREAM_EVAL_DATA: u64 = 4;
pub const STREAM_SOI: u64 = 5;
pub const STREAM_EVAL_NOISE: u64 = 6;
pub const STREAM_FEASIBILITY: u64 = 7;

/// Mean results of one canceller at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CancellerStats {
    /// Mean of the per-realization SINR in dB.
    pub sinr_db: f64,
    pub sinr_se_db: f64,
    /// Digital attenuation of the SI (positive dB), from the mean linear
    /// residual-to-SI ratio.
    pub attenuation_db: f64,
}

/// Measured component powers at the ADC input, referred to the receiver
/// input, dBm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentPowers {
    pub p_si: f64,
    pub p_si_im: f64,
    pub p_imd: f64,
    pub p_imd_im: f64,
    pub p_noise: f64,
    pub p_noise_im: f64,
    pub p_q: f64,
    pub p_soi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TxPoint {
    pub tx_dbm: f64,
    pub realizations: usize,
    pub wl: CancellerStats,
    pub linear: CancellerStats,
    pub components: ComponentPowers,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TxSweepResult {
    pub scenario: String,
    pub points: Vec<TxPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub taps: usize,
    pub training: usize,
    /// False when `N <= 2M + K` leaves the system underdetermined.
    pub feasible: bool,
    pub realizations: usize,
    pub wl: Option<CancellerStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    pub scenario: String,
    pub tx_dbm: f64,
    pub points: Vec<GridPoint>,
}

/// Dominant integer lag of `y` relative to `x`: the energy centroid of the
/// cross-correlation `c(l) = sum y[n] x*[n - l]` over `|l| <= max_lag`,
/// rounded. Unlike the peak, the centroid stays on zero for the
/// derivative-shaped residual the RF canceller leaves behind.
pub fn align_lag(x: &ComplexBasebandSignal, y: &ComplexBasebandSignal, max_lag: isize) -> Result<isize> {
    if x.len() != y.len() {
        return Err(Error::Alignment(format!("x has {} samples, y has {}", x.len(), y.len())));
    }
    let n = x.len() as isize;
    let (xs, ys) = (x.samples(), y.samples());
    let (mut num, mut den) = (0.0, 0.0);
    for l in -max_lag..=max_lag {
        let c: C64 = (l.max(0)..n.min(n + l)).map(|i| ys[i as usize] * xs[(i - l) as usize].conj()).sum();
        num += l as f64 * c.norm_sqr();
        den += c.norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::Alignment("x and y are uncorrelated".into()));
    }
    Ok((num / den).round() as isize)
}

/// Everything that stays fixed across the realizations of one sweep point.
struct PointSetup<'a> {
    cfg: &'a ExperimentConfig,
    params: SystemParameters,
    radio: Transceiver,
    base: RngSeed,
}

struct Trained {
    chain: ImpairmentChain,
    coarse_lag: isize,
    x: ComplexBasebandSignal,
    y: ComplexBasebandSignal,
}

/// Estimates fitted at one alignment lag.
struct Fitted {
    lag: isize,
    wl: ChannelEstimate,
    linear: Option<ChannelEstimate>,
}

struct Evaluation {
    x: ComplexBasebandSignal,
    c: ChainComponents,
    si: ComplexBasebandSignal,
    range: std::ops::Range<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    sinr_db: f64,
    residual_ratio: f64,
}

impl<'a> PointSetup<'a> {
    fn new(cfg: &'a ExperimentConfig, tx_dbm: f64) -> Result<Self> {
        let params = cfg.system.with_tx_power(tx_dbm);
        let radio = Transceiver::from_params(&params, &cfg.chain)?;
        let setup = Self { cfg, params, radio, base: RngSeed(cfg.seed) };
        setup.check_rf_feasible()?;
        Ok(setup)
    }

    fn dac_power(&self) -> f64 {
        dbm_to_w(self.params.dac_power_dbm())
    }

    /// The RF target must be reachable on average over channel draws;
    /// single unlucky draws are clamped to their best canceller instead.
    fn check_rf_feasible(&self) -> Result<()> {
        let x = ofdm_waveform(&self.cfg.ofdm, 6000, self.dac_power(), self.base.derive(STREAM_FEASIBILITY, 0))?;
        let x_pa = self.radio.transmit(&x).pa_output();
        let floor = expected_rf_floor_db(
            self.params.antenna_attenuation,
            self.cfg.chain.los_to_multipath_ratio,
            self.cfg.chain.rf_delay_error,
            &x_pa,
        )?;
        let target = self.params.rf_cancellation;
        if floor < target {
            return Err(Error::InfeasibleRfTarget { target_db: target, best_db: floor });
        }
        Ok(())
    }

    fn train(&self, r: u64, n: usize) -> Result<Trained> {
        let ch = draw_coupling_channel(
            self.params.antenna_attenuation,
            self.cfg.chain.los_to_multipath_ratio,
            self.base.derive(STREAM_CHANNEL, r),
        )?;
        let x = ofdm_waveform(&self.cfg.ofdm, n + 2 * GUARD, self.dac_power(), self.base.derive(STREAM_TRAIN_DATA, r))?;
        let x_pa = self.radio.transmit(&x).pa_output();
        let delay = self.cfg.chain.rf_delay_error;
        let rf = match calibrate_rf_canceller(&ch, self.params.rf_cancellation, delay, &x_pa) {
            Err(Error::InfeasibleRfTarget { .. }) => best_rf_canceller(&ch, delay, &x_pa)?,
            other => other?,
        };
        let chain = ImpairmentChain::new(self.radio.clone(), ch, rf);
        let y = chain.run(&x, None, self.base.derive(STREAM_TRAIN_NOISE, r))?.output;
        let coarse_lag = align_lag(&x, &y, MAX_LAG)?;
        Ok(Trained { x, y, chain, coarse_lag })
    }

    fn evaluate(&self, r: u64, t: &Trained, len: usize) -> Result<Evaluation> {
        let total = len + 2 * GUARD;
        let x = ofdm_waveform(&self.cfg.ofdm, total, self.dac_power(), self.base.derive(STREAM_EVAL_DATA, r))?;
        let soi =
            ofdm_waveform(&self.cfg.ofdm, total, dbm_to_w(self.params.soi_power), self.base.derive(STREAM_SOI, r))?;
        let c = t.chain.run(&x, Some(&soi), self.base.derive(STREAM_EVAL_NOISE, r))?;
        let si = c.linear_si.add(&c.conj_si)?.add(&c.imd)?.add(&c.imd_image)?;
        Ok(Evaluation { x, c, si, range: GUARD..GUARD + len })
    }

    fn components(&self, e: &Evaluation) -> [f64; 8] {
        let g = self.radio.input_referred_gain();
        let c = &e.c;
        let soi = c.soi.add(&c.soi_image).unwrap_or_else(|_| c.soi.clone());
        [&c.linear_si, &c.conj_si, &c.imd, &c.imd_image, &c.noise, &c.noise_image, &c.quantization, &soi]
            .map(|s| s.slice(e.range.clone()).power() / g)
    }
}

fn fit_at(t: &Trained, lag: isize, n: usize, taps: usize, precursor: usize) -> Result<(ChannelEstimate, f64)> {
    let w = GUARD..GUARD + n;
    let x = shift(&t.x, lag).slice(w.clone());
    let y = t.y.slice(w);
    let est = estimate_wl_ls(&build_augmented_matrix(&x, &y, taps, precursor)?)?;
    let residual = y.sub(&est.predict(&x))?;
    // The first rows lack full filter support.
    let tail = taps + precursor..residual.len();
    Ok((est, residual.slice(tail).power()))
}

/// Trains on the first `n` samples. The cross-correlation lag is refined by
/// one sample either way to whichever gives the smallest widely-linear
/// training residual, so the `K` pre-cursor taps land where the response
/// needs them.
fn fit(t: &Trained, n: usize, taps: usize, precursor: usize, with_linear: bool) -> Result<Fitted> {
    let mut best: Option<(isize, ChannelEstimate, f64)> = None;
    for lag in t.coarse_lag - 1..=t.coarse_lag + 1 {
        let (est, res) = fit_at(t, lag, n, taps, precursor)?;
        if best.as_ref().map_or(true, |b| res < b.2) {
            best = Some((lag, est, res));
        }
    }
    let (lag, wl, _) = best.expect("three candidate lags");
    let linear = if with_linear {
        let w = GUARD..GUARD + n;
        let m = build_augmented_matrix(&shift(&t.x, lag).slice(w.clone()), &t.y.slice(w), taps, precursor)?;
        Some(estimate_linear_ls(&m)?)
    } else {
        None
    };
    Ok(Fitted { lag, wl, linear })
}

fn outcome(est: &ChannelEstimate, lag: isize, e: &Evaluation) -> Result<Outcome> {
    let pred = est.predict(&shift(&e.x, lag)).slice(e.range.clone());
    let residual = e.c.output.slice(e.range.clone()).sub(&pred)?;
    let soi = e.c.soi_total().slice(e.range.clone());
    let si = e.si.slice(e.range.clone());
    let residual_si = si.sub(&pred)?;
    Ok(Outcome { sinr_db: measure_sinr(&residual, &soi)?, residual_ratio: residual_si.power() / si.power() })
}

/// Mean and standard error of the dB SINRs, attenuation from the mean ratio.
fn summarize(outcomes: &[Outcome]) -> CancellerStats {
    let n = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.sinr_db).sum::<f64>() / n;
    let se = if outcomes.len() > 1 {
        (outcomes.iter().map(|o| (o.sinr_db - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        f64::NAN
    };
    // Attenuation is averaged in dB across realizations, like the SINR.
    let attenuation = outcomes.iter().map(|o| -lin_to_db(o.residual_ratio)).sum::<f64>() / n;
    CancellerStats { sinr_db: mean, sinr_se_db: se, attenuation_db: attenuation }
}

/// Drops realizations whose data matrix came out singular; anything else is
/// fatal.
fn completed<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err(Error::Singular { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn run_tx_point(cfg: &ExperimentConfig, tx_dbm: f64) -> Result<TxPoint> {
    let s = &cfg.sweep_tx;
    let setup = PointSetup::new(cfg, tx_dbm)?;
    let trials: Vec<Result<(Outcome, Outcome, [f64; 8])>> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let t = setup.train(r, s.training)?;
            let e = setup.evaluate(r, &t, s.evaluation)?;
            let f = fit(&t, s.training, s.taps, s.precursor, true)?;
            let wl = outcome(&f.wl, f.lag, &e)?;
            let lin = outcome(f.linear.as_ref().expect("linear fit requested"), f.lag, &e)?;
            Ok((wl, lin, setup.components(&e)))
        })
        .collect();
    let trials = completed(trials)?;
    if trials.is_empty() {
        return Err(Error::Singular { condition: f64::INFINITY });
    }
    let n = trials.len() as f64;
    let mut mean = [0.0; 8];
    for (_, _, p) in &trials {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v / n;
        }
    }
    let [p_si, p_si_im, p_imd, p_imd_im, p_noise, p_noise_im, p_q, p_soi] = mean.map(w_to_dbm);
    let wl: Vec<Outcome> = trials.iter().map(|t| t.0).collect();
    let lin: Vec<Outcome> = trials.iter().map(|t| t.1).collect();
    Ok(TxPoint {
        tx_dbm,
        realizations: trials.len(),
        wl: summarize(&wl),
        linear: summarize(&lin),
        components: ComponentPowers { p_si, p_si_im, p_imd, p_imd_im, p_noise, p_noise_im, p_q, p_soi },
    })
}

/// SINR and digital attenuation of both cancellers at each transmit power.
pub fn run_tx_power_sweep(cfg: &ExperimentConfig) -> Result<TxSweepResult> {
    cfg.validate().map_err(|e| e.in_scenario(&cfg.scenario))?;
    let points = cfg
        .sweep_tx
        .tx_dbm
        .par_iter()
        .map(|&tx| run_tx_point(cfg, tx))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_scenario(&cfg.scenario))?;
    Ok(TxSweepResult { scenario: cfg.scenario.clone(), points })
}

/// Widely-linear SINR and attenuation over the `(M, N)` grid. Every training
/// length of a realization reuses the prefix of one long training burst.
pub fn run_mn_grid(cfg: &ExperimentConfig) -> Result<GridResult> {
    cfg.validate().map_err(|e| e.in_scenario(&cfg.scenario))?;
    let g = &cfg.grid;
    let run = || -> Result<GridResult> {
        let setup = PointSetup::new(cfg, g.tx_dbm)?;
        let cells: Vec<(usize, usize)> =
            g.taps.iter().flat_map(|&m| g.training.iter().map(move |&n| (m, n))).collect();
        let feasible: Vec<bool> = cells.iter().map(|&(m, n)| n > 2 * m + g.precursor && g.precursor < m).collect();
        let longest = g.training.iter().copied().max().unwrap_or(0);

        let per_realization: Vec<Result<Vec<Option<Outcome>>>> = (0..cfg.realizations as u64)
            .into_par_iter()
            .map(|r| {
                let t = setup.train(r, longest)?;
                let e = setup.evaluate(r, &t, g.evaluation)?;
                cells
                    .iter()
                    .zip(&feasible)
                    .map(|(&(m, n), &ok)| {
                        if !ok {
                            return Ok(None);
                        }
                        match fit(&t, n, m, g.precursor, false) {
                            Ok(f) => outcome(&f.wl, f.lag, &e).map(Some),
                            Err(Error::Singular { .. }) => Ok(None),
                            Err(err) => Err(err),
                        }
                    })
                    .collect()
            })
            .collect();
        let per_realization = per_realization.into_iter().collect::<Result<Vec<_>>>()?;

        let points = cells
            .iter()
            .enumerate()
            .map(|(i, &(taps, training))| {
                let done: Vec<Outcome> = per_realization.iter().filter_map(|row| row[i]).collect();
                GridPoint {
                    taps,
                    training,
                    feasible: feasible[i],
                    realizations: done.len(),
                    wl: (!done.is_empty()).then(|| summarize(&done)),
                }
            })
            .collect();
        Ok(GridResult { scenario: cfg.scenario.clone(), tx_dbm: g.tx_dbm, points })
    };
    run().map_err(|e| e.in_scenario(&cfg.scenario))
}
