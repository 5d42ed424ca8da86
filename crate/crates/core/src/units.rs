//! Decibel and power-unit conversions.

/// Power ratio in dB to linear.
#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB. Zero maps to negative infinity.
#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// dBm to watts.
#[inline]
pub fn dbm_to_w(dbm: f64) -> f64 {
    1e-3 * db_to_lin(dbm)
}

/// Watts to dBm.
#[inline]
pub fn w_to_dbm(w: f64) -> f64 {
    lin_to_db(w / 1e-3)
}

/// Amplitude (voltage-like) gain for a power gain given in dB.
#[inline]
pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Exact power sum of levels given in dB (or dBm). Negative-infinity
/// entries contribute nothing.
pub fn power_sum_db<I: IntoIterator<Item = f64>>(levels: I) -> f64 {
    lin_to_db(levels.into_iter().map(db_to_lin).sum())
}
