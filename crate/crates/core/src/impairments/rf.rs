//! Analog RF canceller: subtracts a scaled, slightly mis-timed replica of the
//! PA output before the LNA.

use crate::error::{Error, Result};
use crate::impairments::channel::CouplingChannel;
use crate::signal::{fractional_delay_kernel, ComplexBasebandSignal, Fir, C64, FRACTIONAL_DELAY_TAPS};
use crate::units::lin_to_db;

#[derive(Debug, Clone, PartialEq)]
pub struct RfCanceller {
    /// Complex gain applied to the delayed replica.
    pub gain: C64,
    /// Timing error of the replica, in samples.
    pub delay_error: f64,
    /// Attenuation of the total SI measured at calibration, dB (positive).
    pub attenuation_db: f64,
    kernel: Fir,
}

impl RfCanceller {
    /// A canceller that does nothing.
    pub fn disabled() -> Self {
        Self { gain: C64::new(0.0, 0.0), delay_error: 0.0, attenuation_db: 0.0, kernel: Fir::delta() }
    }

    fn with_gain(gain: C64, delay_error: f64, kernel: Fir) -> Self {
        Self { gain, delay_error, attenuation_db: 0.0, kernel }
    }

    /// Response from PA output to the LNA input: `h_ch - a D`.
    pub fn residual_response(&self, ch: &CouplingChannel) -> Fir {
        ch.taps.minus(&self.kernel.scaled(self.gain))
    }

    /// Coupled SI after cancellation for a PA output signal.
    pub fn apply(&self, ch: &CouplingChannel, x_pa: &ComplexBasebandSignal) -> ComplexBasebandSignal {
        x_pa.with_samples(self.residual_response(ch).apply(x_pa.samples()))
    }
}

struct Fit {
    si: Vec<C64>,
    replica: Vec<C64>,
    c_opt: C64,
    si_energy: f64,
}

impl Fit {
    fn new(ch: &CouplingChannel, kernel: &Fir, x_pa: &ComplexBasebandSignal) -> Result<Self> {
        let edge = kernel.len().max(ch.taps.len());
        if x_pa.len() <= 4 * edge {
            return Err(Error::Domain(format!(
                "{} samples are too few to calibrate the RF canceller",
                x_pa.len()
            )));
        }
        let range = edge..x_pa.len() - edge;
        let si = ch.taps.apply(x_pa.samples())[range.clone()].to_vec();
        let replica = kernel.apply(x_pa.samples())[range].to_vec();
        let dd: f64 = replica.iter().map(|d| d.norm_sqr()).sum();
        let ds: C64 = replica.iter().zip(&si).map(|(d, s)| d.conj() * s).sum();
        let si_energy = si.iter().map(|s| s.norm_sqr()).sum();
        if dd == 0.0 || si_energy == 0.0 {
            return Err(Error::Domain("RF calibration needs non-zero PA output".into()));
        }
        Ok(Self { si, replica, c_opt: ds / dd, si_energy })
    }

    /// Residual-to-SI power ratio with gain `c_opt (1 + eps)`.
    fn ratio(&self, eps: f64) -> f64 {
        let a = self.c_opt * (1.0 + eps);
        let e: f64 = self.si.iter().zip(&self.replica).map(|(s, d)| (s - a * d).norm_sqr()).sum();
        e / self.si_energy
    }
}

/// Best canceller for a fixed delay error: the least-squares gain, no
/// amplitude error.
pub fn best_rf_canceller(ch: &CouplingChannel, delay_error: f64, x_pa: &ComplexBasebandSignal) -> Result<RfCanceller> {
    let kernel = fractional_delay_kernel(delay_error, FRACTIONAL_DELAY_TAPS);
    let fit = Fit::new(ch, &kernel, x_pa)?;
    let mut rf = RfCanceller::with_gain(fit.c_opt, delay_error, kernel);
    rf.attenuation_db = -lin_to_db(fit.ratio(0.0));
    Ok(rf)
}

/// Attenuation (dB) the best canceller reaches on average over channel
/// realizations: the delay-limited LOS residual plus the multipath power,
/// which the replica cannot follow, relative to the total coupling.
pub fn expected_rf_floor_db(
    antenna_attenuation_db: f64,
    ratio_db: f64,
    delay_error: f64,
    x_pa: &ComplexBasebandSignal,
) -> Result<f64> {
    let los = CouplingChannel::los_only(antenna_attenuation_db);
    let r_los = 10f64.powf(-best_rf_canceller(&los, delay_error, x_pa)?.attenuation_db / 10.0);
    let mp = 10f64.powf(-ratio_db / 10.0);
    Ok(-lin_to_db((r_los + mp) / (1.0 + mp)))
}

/// Calibrates the canceller gain so the total SI drops by `target_db`.
///
/// The replica is delayed by `delay_error` samples. Starting from the
/// least-squares gain, an amplitude error is found by bisection on the
/// residual power. A target beyond the delay-limited floor is rejected with
/// the best achievable attenuation.
pub fn calibrate_rf_canceller(
    ch: &CouplingChannel,
    target_db: f64,
    delay_error: f64,
    x_pa: &ComplexBasebandSignal,
) -> Result<RfCanceller> {
    if !(target_db >= 0.0) || !target_db.is_finite() {
        return Err(Error::Domain(format!("RF target must be a finite non-negative dB value, got {target_db}")));
    }
    if !(delay_error.abs() < 1.0) {
        return Err(Error::Domain(format!("delay error must be below one sample, got {delay_error}")));
    }
    let kernel = fractional_delay_kernel(delay_error, FRACTIONAL_DELAY_TAPS);
    let fit = Fit::new(ch, &kernel, x_pa)?;
    let goal = 10f64.powf(-target_db / 10.0);
    let floor = fit.ratio(0.0);
    if floor > goal {
        return Err(Error::InfeasibleRfTarget { target_db, best_db: -lin_to_db(floor) });
    }
    let mut hi = 1.0;
    while fit.ratio(hi) < goal {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fit.ratio(mid) < goal {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let eps = 0.5 * (lo + hi);
    let mut rf = RfCanceller::with_gain(fit.c_opt * (1.0 + eps), delay_error, kernel);
    rf.attenuation_db = -lin_to_db(fit.ratio(eps));
    Ok(rf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impairments::channel::draw_coupling_channel;
    use crate::ofdm::{ofdm_waveform, OfdmConfig};
    use crate::rng::RngSeed;

    fn x_pa() -> ComplexBasebandSignal {
        ofdm_waveform(&OfdmConfig::default(), 6000, 0.02, RngSeed(11)).unwrap()
    }

    fn measured_db(rf: &RfCanceller, ch: &CouplingChannel, x: &ComplexBasebandSignal) -> f64 {
        let r = 100..x.len() - 100;
        let before = ch.apply(x).slice(r.clone()).power();
        let after = rf.apply(ch, x).slice(r).power();
        -lin_to_db(after / before)
    }

    #[test]
    fn ideal_timing_cancels_los_completely() {
        // White drive, so the multipath taps cannot be partly absorbed by
        // the LOS gain.
        let x = crate::signal::awgn(0.02, 6000, 64e6, RngSeed(12)).unwrap();
        let ch = draw_coupling_channel(40.0, f64::INFINITY, RngSeed(2)).unwrap();
        let rf = best_rf_canceller(&ch, 0.0, &x).unwrap();
        assert!(rf.attenuation_db > 200.0, "{}", rf.attenuation_db);
        let mp = draw_coupling_channel(40.0, 35.8, RngSeed(2)).unwrap();
        let rf = best_rf_canceller(&mp, 0.0, &x).unwrap();
        // Only the multipath taps remain.
        let t = mp.taps.taps();
        let expect = -lin_to_db((t[1].norm_sqr() + t[2].norm_sqr()) / mp.taps.energy());
        assert!((rf.attenuation_db - expect).abs() < 0.3, "{} vs {expect}", rf.attenuation_db);
    }

    #[test]
    fn hits_20_db_with_ten_percent_delay_error() {
        let x = x_pa();
        let ch = draw_coupling_channel(30.0, 35.8, RngSeed(5)).unwrap();
        let rf = calibrate_rf_canceller(&ch, 20.0, 0.1, &x).unwrap();
        assert!((rf.attenuation_db - 20.0).abs() < 1e-6);
        assert!((measured_db(&rf, &ch, &x) - 20.0).abs() < 0.5);
    }

    #[test]
    fn thirty_db_needs_tighter_timing() {
        let x = x_pa();
        let ch = CouplingChannel::los_only(40.0);
        match calibrate_rf_canceller(&ch, 30.0, 0.1, &x) {
            Err(Error::InfeasibleRfTarget { best_db, .. }) => assert!(best_db > 27.0 && best_db < 30.0, "{best_db}"),
            other => panic!("expected infeasible target, got {other:?}"),
        }
        let rf = calibrate_rf_canceller(&ch, 30.0, 0.07, &x).unwrap();
        assert!((measured_db(&rf, &ch, &x) - 30.0).abs() < 0.5);
        // Averaged over multipath draws, 0.1 falls short and 0.07 clears 30 dB.
        assert!(expected_rf_floor_db(40.0, 35.8, 0.1, &x).unwrap() < 30.0);
        assert!(expected_rf_floor_db(40.0, 35.8, 0.07, &x).unwrap() > 30.0);
    }

    #[test]
    fn delay_floor_matches_phase_error_approximation() {
        // Independent oracle: for a flat-spectrum band |f T| <= B the delay
        // residual is (2 pi tau)^2 B^2 / 3 with the optimal gain.
        let x = x_pa();
        let ch = draw_coupling_channel(40.0, f64::INFINITY, RngSeed(8)).unwrap();
        let tau = 0.1;
        let rf = best_rf_canceller(&ch, tau, &x).unwrap();
        let band = 24.5 / 256.0;
        let approx = -lin_to_db((2.0 * std::f64::consts::PI * tau).powi(2) * band * band / 3.0);
        assert!((rf.attenuation_db - approx).abs() < 0.5, "{} vs {approx}", rf.attenuation_db);
    }
}
