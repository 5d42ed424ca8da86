//! The simulated receive chain against its closed-form responses.

use fdsic::impairments::chain::{ChainOptions, ImpairmentChain, Transceiver};
use fdsic::impairments::channel::draw_coupling_channel;
use fdsic::impairments::pa::imd_term;
use fdsic::impairments::rf::{best_rf_canceller, calibrate_rf_canceller};
use fdsic::ofdm::ofdm_waveform;
use fdsic::units::{db_to_lin, dbm_to_w, lin_to_db};
use fdsic::{ComplexBasebandSignal, OfdmConfig, RngSeed, SystemParameters, C64};

fn chain_for(p: &SystemParameters, seed: u64) -> (ImpairmentChain, ComplexBasebandSignal) {
    let radio = Transceiver::from_params(p, &ChainOptions::default()).unwrap();
    let x = ofdm_waveform(&OfdmConfig::default(), 6000, dbm_to_w(p.dac_power_dbm()), RngSeed(seed)).unwrap();
    let ch = draw_coupling_channel(p.antenna_attenuation, 35.8, RngSeed(seed + 1)).unwrap();
    let x_pa = radio.transmit(&x).pa_output();
    let rf = calibrate_rf_canceller(&ch, p.rf_cancellation, 0.07, &x_pa)
        .or_else(|_| best_rf_canceller(&ch, 0.07, &x_pa))
        .unwrap();
    (ImpairmentChain::new(radio, ch, rf), x)
}

fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    let den: f64 = b.iter().map(|q| q.norm_sqr()).sum();
    (num / den).sqrt()
}

fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

#[test]
fn linear_and_conjugate_si_match_widely_linear_responses() {
    let p = SystemParameters::default().with_tx_power(12.0);
    let (chain, x) = chain_for(&p, 100);
    let c = chain.run(&x, None, RngSeed(102)).unwrap();
    let (h1, h2) = chain.wl_responses();
    let conj: Vec<C64> = x.samples().iter().map(|v| v.conj()).collect();
    let predicted = add(&h1.apply(x.samples()), &h2.apply(&conj));
    let e = rel_err(c.wl_si().samples(), &predicted);
    assert!(e < 1e-10, "{e:e}");
}

#[test]
fn imd_matches_cubic_basis_through_its_responses() {
    let p = SystemParameters::default().with_tx_power(20.0);
    let (chain, x) = chain_for(&p, 110);
    let c = chain.run(&x, None, RngSeed(112)).unwrap();
    let basis = imd_term(chain.radio.transmit(&x).mixer.samples());
    let basis_conj: Vec<C64> = basis.iter().map(|v| v.conj()).collect();
    let (h, h_im) = chain.imd_responses();
    assert!(rel_err(c.imd.samples(), &h.apply(&basis)) < 1e-10);
    assert!(rel_err(c.imd_image.samples(), &h_im.apply(&basis_conj)) < 1e-10);
}

#[test]
fn widely_linear_residual_is_the_imd_and_noise() {
    let p = SystemParameters::default().with_tx_power(18.0);
    let (chain, x) = chain_for(&p, 120);
    let c = chain.run(&x, None, RngSeed(122)).unwrap();
    let (h1, h2) = chain.wl_responses();
    let conj: Vec<C64> = x.samples().iter().map(|v| v.conj()).collect();
    let predicted = add(&h1.apply(x.samples()), &h2.apply(&conj));
    let residual: Vec<C64> = c.adc_input.samples().iter().zip(&predicted).map(|(a, b)| a - b).collect();
    let rest = add(
        &add(c.imd.samples(), c.imd_image.samples()),
        &add(c.noise.samples(), c.noise_image.samples()),
    );
    assert!(rel_err(&residual, &rest) < 1e-9);
}

// Image-to-direct energy of the flat parts of the responses.
fn image_ratio_db(p: &SystemParameters, seed: u64) -> f64 {
    let (chain, x) = chain_for(p, seed);
    let c = chain.run(&x, None, RngSeed(seed + 2)).unwrap();
    lin_to_db(c.conj_si.power() / c.linear_si.power())
}

#[test]
fn image_power_follows_each_mixer() {
    let base = SystemParameters::default().with_tx_power(10.0);
    let tx_only = SystemParameters { irr_rx: f64::INFINITY, ..base.clone() };
    let rx_only = SystemParameters { irr_tx: f64::INFINITY, ..base.clone() };
    let t = image_ratio_db(&tx_only, 130);
    let r = image_ratio_db(&rx_only, 130);
    assert!((t + base.irr_tx).abs() < 0.3, "TX image at {t:.2} dB");
    assert!((r + base.irr_rx).abs() < 0.3, "RX image at {r:.2} dB");

    // With both active the two images add coherently with a phase set by the
    // coupling path; on average over channels their powers add.
    let mean: f64 = (0..40).map(|s| db_to_lin(image_ratio_db(&base, 200 + 3 * s))).sum::<f64>() / 40.0;
    let want = db_to_lin(-base.irr_tx) + db_to_lin(-base.irr_rx);
    let gap = lin_to_db(mean / want);
    assert!(gap.abs() < 0.5, "mean image {:.2} dB, power sum {:.2} dB", lin_to_db(mean), lin_to_db(want));
}
