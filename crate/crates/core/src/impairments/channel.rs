//! Antenna coupling channel: a line-of-sight tap plus two weak multipath
//! taps one and two samples later.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::signal::{ComplexBasebandSignal, Fir, C64};
use crate::units::db_to_lin;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingChannel {
    pub taps: Fir,
    pub los_to_multipath_ratio_db: f64,
    pub antenna_attenuation_db: f64,
}

impl CouplingChannel {
    /// Line-of-sight tap only, zero phase.
    pub fn los_only(antenna_attenuation_db: f64) -> Self {
        Self {
            taps: Fir::causal(vec![C64::new(db_to_lin(-antenna_attenuation_db).sqrt(), 0.0)]),
            los_to_multipath_ratio_db: f64::INFINITY,
            antenna_attenuation_db,
        }
    }

    pub fn los(&self) -> C64 {
        self.taps.taps()[0]
    }

    pub fn apply(&self, x: &ComplexBasebandSignal) -> ComplexBasebandSignal {
        x.with_samples(self.taps.apply(x.samples()))
    }
}

/// Draws one static channel realization.
///
/// The LOS tap has deterministic magnitude `10^(-att/20)` and uniform phase;
/// the two multipath taps are circular Gaussian, sharing the multipath power
/// `ratio` dB below the LOS equally.
pub fn draw_coupling_channel(antenna_attenuation_db: f64, ratio_db: f64, seed: RngSeed) -> Result<CouplingChannel> {
    if !(ratio_db > 0.0) {
        return Err(Error::Domain(format!("LOS-to-multipath ratio must be positive, got {ratio_db} dB")));
    }
    if !antenna_attenuation_db.is_finite() {
        return Err(Error::Domain("antenna attenuation must be finite".into()));
    }
    let mut rng = seed.rng();
    let los_power = db_to_lin(-antenna_attenuation_db);
    let los = C64::from_polar(los_power.sqrt(), rng.random_range(0.0..2.0 * PI));
    let sigma = (los_power * db_to_lin(-ratio_db) / 4.0).sqrt();
    let mut gauss = || {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(sigma * re, sigma * im)
    };
    let taps = vec![los, gauss(), gauss()];
    Ok(CouplingChannel {
        taps: Fir::causal(taps),
        los_to_multipath_ratio_db: ratio_db,
        antenna_attenuation_db,
    })
}
