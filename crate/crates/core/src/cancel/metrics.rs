//! Digital attenuation and SINR measurements.

use crate::error::{Error, Result};
use crate::signal::ComplexBasebandSignal;
use crate::units::lin_to_db;

/// Lowest attenuation ratio reported, dB. Perfect cancellation is clamped
/// here instead of returning negative infinity.
pub const ATTENUATION_FLOOR_DB: f64 = -300.0;

/// Power of `after` relative to `before`, dB. Negative values mean the SI
/// was attenuated.
pub fn measure_digital_attenuation(before: &ComplexBasebandSignal, after: &ComplexBasebandSignal) -> Result<f64> {
    let pb = before.power();
    if pb == 0.0 {
        return Err(Error::Domain("SI power before cancellation is zero".into()));
    }
    Ok(lin_to_db(after.power() / pb).max(ATTENUATION_FLOOR_DB))
}

/// `P(soi) / P(residual - soi)`, dB. `soi` is the signal of interest as it
/// appears inside `residual`.
pub fn measure_sinr(residual: &ComplexBasebandSignal, soi: &ComplexBasebandSignal) -> Result<f64> {
    let rest = residual.sub(soi)?;
    Ok(lin_to_db(soi.power() / rest.power()))
}
