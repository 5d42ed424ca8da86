//! Baseband-equivalent RF impairment operators, in signal-flow order.

pub mod adc;
pub mod chain;
pub mod channel;
pub mod iq;
pub mod lna;
pub mod pa;
pub mod rf;

pub use adc::{apply_agc_adc, snr_adc_db, AdcModel, AdcOutput, AgcMode};
pub use chain::{ChainComponents, ChainOptions, ImpairmentChain, Transceiver, TxOutput};
pub use channel::{draw_coupling_channel, CouplingChannel};
pub use iq::{apply_rx_iq, apply_tx_iq, derive_iq_from_irr, IqImbalance, PhaseSplit};
pub use lna::{apply_lna, LnaModel};
pub use pa::{apply_pa, calibrate_pa, PaModel};
pub use rf::{best_rf_canceller, calibrate_rf_canceller, expected_rf_floor_db, RfCanceller};
