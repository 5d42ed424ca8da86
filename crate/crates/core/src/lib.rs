//! Baseband full-duplex transceiver simulator with widely-linear digital
//! self-interference cancellation.
//!
//! The crate models the transmit chain (IQ mixer, PA), the antenna coupling
//! and RF canceller, and the receive chain (LNA, IQ mixer, AGC and ADC) at
//! complex baseband. On top of it sit a closed-form power budget, linear and
//! widely-linear least-squares cancellers, an estimator bias analysis, and a
//! Monte-Carlo harness that sweeps transmit power and training length.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod bias;
pub mod budget;
pub mod cancel;
pub mod error;
pub mod harness;
pub mod impairments;
pub mod ofdm;
pub mod params;
pub mod rng;
pub mod signal;
pub mod units;

pub use error::{Error, Result};
pub use ofdm::OfdmConfig;
pub use params::SystemParameters;
pub use rng::RngSeed;
pub use signal::{ComplexBasebandSignal, Fir, C64};
