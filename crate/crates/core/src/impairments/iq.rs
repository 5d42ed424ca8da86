//! IQ mixer imbalance as a widely-linear pair of responses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ComplexBasebandSignal, Fir, C64};
use crate::units::db_to_lin;

/// Output is `g1 ⋆ x + g2 ⋆ x*`.
#[derive(Debug, Clone, PartialEq)]
pub struct IqImbalance {
    g1: Fir,
    g2: Fir,
}

/// How the image is shared between phase and amplitude error.
///
/// `phase_share` is the fraction of the largest phase error able to produce
/// the target image on its own. The amplitude error then trims to the exact
/// IRR. `1.0` gives a phase-only imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSplit {
    pub phase_share: f64,
}

impl Default for PhaseSplit {
    fn default() -> Self {
        Self { phase_share: 0.5 }
    }
}

impl IqImbalance {
    pub fn new(g1: Fir, g2: Fir) -> Self {
        Self { g1, g2 }
    }

    /// Balanced mixer with power gain `gain_db`.
    pub fn ideal(gain_db: f64) -> Self {
        let g = db_to_lin(gain_db).sqrt();
        Self::new(Fir::scalar(C64::new(g, 0.0)), Fir::scalar(C64::new(0.0, 0.0)))
    }

    /// Flat imbalance from an amplitude error `eps` and phase error `phi`
    /// (radians), scaled so `|g1|^2 + |g2|^2` equals the mixer power gain.
    pub fn from_errors(eps: f64, phi: f64, gain_db: f64) -> Self {
        let e = C64::from_polar(1.0 + eps, -phi);
        let g1 = (C64::new(1.0, 0.0) + e) / 2.0;
        let g2 = (C64::new(1.0, 0.0) - e) / 2.0;
        let norm = (db_to_lin(gain_db) / (g1.norm_sqr() + g2.norm_sqr())).sqrt();
        Self::new(Fir::scalar(g1 * norm), Fir::scalar(g2 * norm))
    }

    pub fn g1(&self) -> &Fir {
        &self.g1
    }

    pub fn g2(&self) -> &Fir {
        &self.g2
    }

    /// Frequency-flat direct and image gains (tap sums).
    pub fn flat(&self) -> (C64, C64) {
        (self.g1.taps().iter().sum(), self.g2.taps().iter().sum())
    }

    /// Energy ratio of direct to image response, dB.
    pub fn irr_db(&self) -> f64 {
        10.0 * (self.g1.energy() / self.g2.energy()).log10()
    }

    pub fn apply(&self, x: &ComplexBasebandSignal) -> ComplexBasebandSignal {
        let direct = self.g1.apply(x.samples());
        let conj: Vec<C64> = x.samples().iter().map(|s| s.conj()).collect();
        let image = self.g2.apply(&conj);
        x.with_samples(direct.into_iter().zip(image).map(|(a, b)| a + b).collect())
    }
}

/// Builds a flat imbalance with image rejection `irr_db` and mixer power
/// gain `gain_db`. An infinite IRR yields a balanced mixer.
pub fn derive_iq_from_irr(irr_db: f64, gain_db: f64, split: PhaseSplit) -> Result<IqImbalance> {
    if irr_db == f64::INFINITY {
        return Ok(IqImbalance::ideal(gain_db));
    }
    if !(irr_db > 0.0) {
        return Err(Error::Domain(format!("IRR must be positive, got {irr_db} dB")));
    }
    if !(0.0..=1.0).contains(&split.phase_share) {
        return Err(Error::Config(format!("phase share {} outside [0, 1]", split.phase_share)));
    }
    let rho = db_to_lin(-irr_db);
    // With eps = 0 the IRR is cot^2(phi/2).
    let phi = split.phase_share * 2.0 * rho.sqrt().atan();
    // Solve (1 + a^2 + 2ac) rho = 1 + a^2 - 2ac for a = 1 + eps >= 1.
    let c = phi.cos();
    let disc = ((1.0 + rho) * c).powi(2) - (1.0 - rho).powi(2);
    let a = ((1.0 + rho) * c + disc.max(0.0).sqrt()) / (1.0 - rho);
    Ok(IqImbalance::from_errors(a - 1.0, phi, gain_db))
}

/// TX-side imbalance applied to the DAC output.
pub fn apply_tx_iq(imb: &IqImbalance, x: &ComplexBasebandSignal) -> ComplexBasebandSignal {
    imb.apply(x)
}

/// RX-side imbalance applied to the LNA output.
pub fn apply_rx_iq(imb: &IqImbalance, y: &ComplexBasebandSignal) -> ComplexBasebandSignal {
    imb.apply(y)
}
