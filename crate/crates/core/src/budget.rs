//! Closed-form power budget of the receiver after linear digital
//! cancellation.
//!
//! All levels are referred to the receiver input: the common gain
//! `|k_BB|^2 |k_LNA|^2 |g1,RX|^2` is divided out, which leaves SINR
//! unchanged.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::impairments::adc::snr_adc_db;
use crate::impairments::iq::{derive_iq_from_irr, PhaseSplit};
use crate::params::SystemParameters;
use crate::units::{db_to_lin, dbm_to_w, power_sum_db, w_to_dbm};

/// `E|x_IMD|^2 / p^3` for a circular Gaussian-like signal of power `p`.
pub const IMD_MOMENT_FACTOR: f64 = 6.0;

/// How much linear digital cancellation to assume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LdcPolicy {
    /// A fixed attenuation, dB.
    Fixed { db: f64 },
    /// Push the linear SI `margin_db` below the receiver noise floor.
    SuppressBelowNoise { margin_db: f64 },
}

impl Default for LdcPolicy {
    fn default() -> Self {
        LdcPolicy::SuppressBelowNoise { margin_db: 3.0 }
    }
}

/// Component levels in dBm at the detector input, referred to the antenna
/// port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBudget {
    pub tx_dbm: f64,
    pub p_si: f64,
    pub p_si_im: f64,
    pub p_imd: f64,
    pub p_imd_im: f64,
    pub p_noise: f64,
    pub p_noise_im: f64,
    pub p_q: f64,
    pub p_soi: f64,
    /// Total power at the ADC input (SI before digital cancellation), dBm.
    pub p_ad: f64,
    /// Linear SI before digital cancellation, dBm.
    pub p_si_before_ldc: f64,
    pub required_ldc: f64,
    pub sinr: f64,
}

impl PowerBudget {
    /// Residual interference plus noise, dBm.
    pub fn interference(&self) -> f64 {
        power_sum_db([self.p_si, self.p_si_im, self.p_imd, self.p_imd_im, self.p_noise, self.p_noise_im, self.p_q])
    }
}

pub const CSV_HEADER: [&str; 10] =
    ["tx_dbm", "p_si", "p_si_im", "p_imd", "p_imd_im", "p_noise", "p_noise_im", "p_q", "p_soi", "sinr"];

/// Evaluates every component power for the parameters' transmit power.
pub fn compute_budget(p: &SystemParameters, policy: LdcPolicy) -> Result<PowerBudget> {
    p.validate()?;
    let split = PhaseSplit::default();
    let (g1t, g2t) = derive_iq_from_irr(p.irr_tx, p.mixer_gain, split)?.flat();
    let (g1r, g2r) = derive_iq_from_irr(p.irr_rx, p.mixer_gain, split)?.flat();
    let (g1t, g2t, g1r, g2r) = (g1t.norm_sqr(), g2t.norm_sqr(), g1r.norm_sqr(), g2r.norm_sqr());

    let p_x = dbm_to_w(p.dac_power_dbm());
    let p_in = (g1t + g2t) * p_x;
    // Power gains |alpha0|^2 and |alpha1|^2, with |alpha1| = |alpha0| / IIP3.
    let linear_gain = db_to_lin(p.pa_gain);
    let cubic_gain = if p.pa_iip3 == f64::INFINITY { 0.0 } else { linear_gain / dbm_to_w(p.pa_iip3).powi(2) };
    let coupling = db_to_lin(-p.antenna_attenuation - p.rf_cancellation);

    let si_before = linear_gain * g1t * p_x * coupling;
    let si_im = linear_gain * p_x * coupling * (g2t * g1r + g1t * g2r) / g1r;
    let imd = cubic_gain * IMD_MOMENT_FACTOR * p_in.powi(3) * coupling;
    let imd_im = imd * g2r / g1r;
    let noise = db_to_lin(p.noise_figure) * dbm_to_w(p.thermal_floor);
    let noise_im = noise * g2r / g1r;

    let p_si_before_ldc = w_to_dbm(si_before);
    let p_noise = w_to_dbm(noise);
    let required_ldc = match policy {
        LdcPolicy::Fixed { db } => db,
        LdcPolicy::SuppressBelowNoise { margin_db } => (p_si_before_ldc - (p_noise - margin_db)).max(0.0),
    };
    if !required_ldc.is_finite() || required_ldc < 0.0 {
        return Err(Error::Config(format!("invalid digital cancellation {required_ldc} dB")));
    }

    let p_ad = w_to_dbm(si_before + si_im + imd + imd_im + noise + noise_im);
    let p_q = p_ad - snr_adc_db(p.adc_bits, p.papr);
    let mut b = PowerBudget {
        tx_dbm: p.tx_power,
        p_si: p_si_before_ldc - required_ldc,
        p_si_im: w_to_dbm(si_im),
        p_imd: w_to_dbm(imd),
        p_imd_im: w_to_dbm(imd_im),
        p_noise,
        p_noise_im: w_to_dbm(noise_im),
        p_q,
        p_soi: p.soi_power,
        p_ad,
        p_si_before_ldc,
        required_ldc,
        sinr: 0.0,
    };
    b.sinr = b.p_soi - b.interference();
    Ok(b)
}

/// Budget at each transmit power of `tx_dbm`.
pub fn sweep_tx_power(p: &SystemParameters, tx_dbm: &[f64], policy: LdcPolicy) -> Result<Vec<PowerBudget>> {
    if tx_dbm.is_empty() {
        return Err(Error::Config("transmit power sweep is empty".into()));
    }
    tx_dbm.iter().map(|&tx| compute_budget(&p.with_tx_power(tx), policy)).collect()
}

/// Transmit power (dBm) where the conjugate SI first reaches the signal of
/// interest, by linear interpolation over a sweep. `None` if it never does.
pub fn image_crossover(sweep: &[PowerBudget]) -> Option<f64> {
    let d: Vec<f64> = sweep.iter().map(|b| b.p_si_im - b.p_soi).collect();
    if d.first().is_some_and(|v| *v >= 0.0) {
        return Some(sweep[0].tx_dbm);
    }
    d.windows(2).zip(sweep.windows(2)).find(|(v, _)| v[0] < 0.0 && v[1] >= 0.0).map(|(v, s)| {
        let t = -v[0] / (v[1] - v[0]);
        s[0].tx_dbm + t * (s[1].tx_dbm - s[0].tx_dbm)
    })
}

/// Writes a sweep as CSV with the fixed column set.
pub fn write_csv<W: Write>(sweep: &[PowerBudget], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for b in sweep {
        let row = [b.tx_dbm, b.p_si, b.p_si_im, b.p_imd, b.p_imd_im, b.p_noise, b.p_noise_im, b.p_q, b.p_soi, b.sinr];
        w.write_record(row.iter().map(|v| format!("{v:.6}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::lin_to_db;

    fn table1() -> SystemParameters {
        SystemParameters::default()
    }

    fn altered() -> SystemParameters {
        SystemParameters { antenna_attenuation: 30.0, rf_cancellation: 20.0, irr_tx: 35.0, irr_rx: 35.0, ..table1() }
    }

    fn range() -> Vec<f64> {
        (0..=30).map(|i| -5.0 + i as f64).collect()
    }

    #[test]
    fn noise_and_image_identities() {
        let b = compute_budget(&table1(), LdcPolicy::default()).unwrap();
        assert!((b.p_noise + 98.9).abs() < 1e-9);
        assert!((b.p_noise_im - (b.p_noise - 25.0)).abs() < 1e-9);
        assert!((b.p_imd_im - (b.p_imd - 25.0)).abs() < 1e-9);
        // Equal TX and RX IRR: image is the pre-cancellation SI minus IRR
        // plus 3 dB.
        let expect = b.p_si_before_ldc - 25.0 + lin_to_db(2.0);
        assert!((b.p_si_im - expect).abs() < 1e-9, "{} vs {expect}", b.p_si_im);
    }

    #[test]
    fn ideal_mixers_remove_images() {
        let p = SystemParameters { irr_tx: f64::INFINITY, irr_rx: f64::INFINITY, ..table1() };
        let b = compute_budget(&p, LdcPolicy::default()).unwrap();
        assert_eq!(b.p_si_im, f64::NEG_INFINITY);
        assert_eq!(b.p_imd_im, f64::NEG_INFINITY);
        assert_eq!(b.p_noise_im, f64::NEG_INFINITY);
    }

    #[test]
    fn image_crosses_soi_near_9_dbm() {
        let sweep = sweep_tx_power(&table1(), &range(), LdcPolicy::default()).unwrap();
        let x = image_crossover(&sweep).unwrap();
        assert!((x - 9.0).abs() < 2.0, "{x}");
    }

    #[test]
    fn required_ldc_ranges() {
        let sweep = sweep_tx_power(&table1(), &[-5.0, 25.0], LdcPolicy::default()).unwrap();
        assert!((sweep[0].required_ldc - 27.0).abs() < 2.0);
        assert!((sweep[1].required_ldc - 57.0).abs() < 2.0);
        let sweep = sweep_tx_power(&altered(), &[-5.0, 25.0], LdcPolicy::default()).unwrap();
        assert!((sweep[0].required_ldc - 47.0).abs() < 2.0);
        assert!((sweep[1].required_ldc - 77.0).abs() < 2.0);
    }

    #[test]
    fn slopes() {
        let sweep = sweep_tx_power(&table1(), &range(), LdcPolicy::Fixed { db: 40.0 }).unwrap();
        for w in sweep.windows(2) {
            assert!((w[1].p_si_im - w[0].p_si_im - 1.0).abs() < 1e-9);
            assert!((w[1].p_imd - w[0].p_imd - 3.0).abs() < 1e-9);
            assert_eq!(w[1].p_noise, w[0].p_noise);
        }
    }

    #[test]
    fn image_dominates_residuals_in_baseline() {
        let sweep = sweep_tx_power(&table1(), &range(), LdcPolicy::default()).unwrap();
        for b in &sweep {
            for other in [b.p_si, b.p_imd, b.p_imd_im, b.p_noise, b.p_noise_im, b.p_q] {
                assert!(b.p_si_im > other, "tx {}", b.tx_dbm);
            }
        }
    }

    #[test]
    fn imd_matters_above_15_dbm_in_altered_scenario() {
        let sweep = sweep_tx_power(&altered(), &[10.0, 15.0, 20.0, 25.0], LdcPolicy::default()).unwrap();
        assert!(sweep[0].p_imd < sweep[0].p_noise);
        assert!(sweep[3].p_imd > sweep[3].p_noise);
    }

    #[test]
    fn quantization_tracks_adc_load() {
        let a = compute_budget(&table1().with_tx_power(10.0), LdcPolicy::default()).unwrap();
        let b = compute_budget(&table1().with_tx_power(20.0), LdcPolicy::default()).unwrap();
        // SI dominates the ADC input, so 10 dB more SI is 10 dB more p_q.
        assert!((b.p_q - a.p_q - 10.0).abs() < 0.05);
        assert!((a.p_q - (a.p_ad - 67.0)).abs() < 0.01);
    }

    #[test]
    fn csv_layout() {
        let sweep = sweep_tx_power(&table1(), &[0.0, 1.0], LdcPolicy::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&sweep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("tx_dbm,p_si,p_si_im,p_imd,p_imd_im,p_noise,p_noise_im,p_q,p_soi,sinr\n"));
        assert_eq!(text.lines().count(), 3);
        assert!(sweep_tx_power(&table1(), &[], LdcPolicy::default()).is_err());
    }
}
