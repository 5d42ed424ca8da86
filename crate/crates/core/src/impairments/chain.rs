//! The complete transmit-to-ADC chain with per-component bookkeeping.
//!
//! Everything after the PA is widely linear, so each additive part of the
//! PA output, the noise and the received signal are propagated separately.
//! Their sum is the ADC input; the quantization error is whatever the
//! converter adds on top.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::impairments::adc::{apply_agc_adc, AdcModel, AgcMode};
use crate::impairments::channel::CouplingChannel;
use crate::impairments::iq::{derive_iq_from_irr, IqImbalance, PhaseSplit};
use crate::impairments::lna::LnaModel;
use crate::impairments::pa::{calibrate_pa, imd_term, PaModel};
use crate::impairments::rf::RfCanceller;
use crate::params::SystemParameters;
use crate::rng::RngSeed;
use crate::signal::{awgn, ComplexBasebandSignal, Fir, C64};
use crate::units::dbm_to_w;

/// Waveform-simulation settings that have no place in the link budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainOptions {
    /// LOS to total multipath power of the coupling channel, dB.
    pub los_to_multipath_ratio: f64,
    /// Timing error of the RF canceller replica, samples.
    pub rf_delay_error: f64,
    pub phase_share: f64,
    /// Use the short lowpass PA memory instead of a memoryless PA.
    pub pa_memory: bool,
    pub agc: AgcMode,
    pub quantize: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            los_to_multipath_ratio: 35.8,
            rf_delay_error: 0.07,
            phase_share: PhaseSplit::default().phase_share,
            pa_memory: false,
            agc: AgcMode::Peak,
            quantize: true,
        }
    }
}

/// The realization-independent part of the transceiver.
#[derive(Debug, Clone, PartialEq)]
pub struct Transceiver {
    pub tx_iq: IqImbalance,
    pub pa: PaModel,
    pub lna: LnaModel,
    pub rx_iq: IqImbalance,
    pub adc: AdcModel,
    /// Thermal noise at the receiver input, W.
    pub thermal_noise: f64,
}

/// PA output split by origin.
#[derive(Debug, Clone)]
pub struct TxOutput {
    /// `alpha0 f ⋆ g1T ⋆ x`.
    pub linear_direct: ComplexBasebandSignal,
    /// `alpha0 f ⋆ g2T ⋆ x*`.
    pub linear_image: ComplexBasebandSignal,
    /// `alpha1 f ⋆ x_IMD` with `x_IMD` built from the mixer output.
    pub imd: ComplexBasebandSignal,
    /// TX mixer output.
    pub mixer: ComplexBasebandSignal,
}

impl TxOutput {
    pub fn pa_output(&self) -> ComplexBasebandSignal {
        let s = self.linear_direct.add(&self.linear_image).expect("same length");
        s.add(&self.imd).expect("same length")
    }
}

impl Transceiver {
    pub fn from_params(p: &SystemParameters, opts: &ChainOptions) -> Result<Self> {
        p.validate()?;
        let split = PhaseSplit { phase_share: opts.phase_share };
        let memory = opts.pa_memory.then(PaModel::memory_lowpass);
        Ok(Self {
            tx_iq: derive_iq_from_irr(p.irr_tx, p.mixer_gain, split)?,
            pa: calibrate_pa(p.pa_gain, p.pa_iip3, memory)?,
            lna: LnaModel { gain_db: p.lna_gain, noise_figure_db: p.noise_figure },
            rx_iq: derive_iq_from_irr(p.irr_rx, p.mixer_gain, split)?,
            adc: AdcModel {
                bits: opts.quantize.then_some(p.adc_bits),
                peak_to_peak_voltage: p.adc_vpp,
                papr_db: p.papr,
                agc: opts.agc,
            },
            thermal_noise: dbm_to_w(p.thermal_floor),
        })
    }

    pub fn transmit(&self, x: &ComplexBasebandSignal) -> TxOutput {
        let conj = x.conj();
        let direct = x.with_samples(self.tx_iq.g1().apply(x.samples()));
        let image = x.with_samples(self.tx_iq.g2().apply(conj.samples()));
        let mixer = direct.add(&image).expect("same length");
        let f = &self.pa.memory;
        let scale = |s: &ComplexBasebandSignal, c: C64| -> Vec<C64> { s.samples().iter().map(|v| v * c).collect() };
        let imd: Vec<C64> = imd_term(mixer.samples()).into_iter().map(|v| v * self.pa.alpha1).collect();
        TxOutput {
            linear_direct: x.with_samples(f.apply(&scale(&direct, self.pa.alpha0))),
            linear_image: x.with_samples(f.apply(&scale(&image, self.pa.alpha0))),
            imd: x.with_samples(f.apply(&imd)),
            mixer,
        }
    }

    /// Gain from the receiver input to the ADC input for the direct path,
    /// `|k_LNA|^2 |g1R|^2`, used to refer digital-domain powers back to the
    /// antenna port.
    pub fn input_referred_gain(&self) -> f64 {
        self.lna.gain().norm_sqr() * self.rx_iq.g1().energy()
    }
}

/// A transceiver together with one coupling-channel realization and its
/// calibrated RF canceller.
#[derive(Debug, Clone)]
pub struct ImpairmentChain {
    pub radio: Transceiver,
    pub channel: CouplingChannel,
    pub rf: RfCanceller,
}

/// Every additive component at the ADC, referred to the ADC input scale
/// (VGA gain divided out).
#[derive(Debug, Clone)]
pub struct ChainComponents {
    pub linear_si: ComplexBasebandSignal,
    pub conj_si: ComplexBasebandSignal,
    pub imd: ComplexBasebandSignal,
    pub imd_image: ComplexBasebandSignal,
    pub noise: ComplexBasebandSignal,
    pub noise_image: ComplexBasebandSignal,
    pub soi: ComplexBasebandSignal,
    pub soi_image: ComplexBasebandSignal,
    pub quantization: ComplexBasebandSignal,
    /// Quantized ADC output divided by the VGA gain.
    pub output: ComplexBasebandSignal,
    pub vga_gain: f64,
    /// Sum of all analog components (the ADC input).
    pub adc_input: ComplexBasebandSignal,
    /// PA output, for RF calibration.
    pub pa_output: ComplexBasebandSignal,
}

impl ChainComponents {
    /// Received signal of interest including its RX image.
    pub fn soi_total(&self) -> ComplexBasebandSignal {
        self.soi.add(&self.soi_image).expect("same length")
    }

    /// Linear plus conjugate SI, the part a widely-linear canceller targets.
    pub fn wl_si(&self) -> ComplexBasebandSignal {
        self.linear_si.add(&self.conj_si).expect("same length")
    }
}

fn sum(parts: &[&ComplexBasebandSignal]) -> ComplexBasebandSignal {
    let mut acc = parts[0].samples().to_vec();
    for p in &parts[1..] {
        for (a, b) in acc.iter_mut().zip(p.samples()) {
            *a += b;
        }
    }
    parts[0].with_samples(acc)
}

impl ImpairmentChain {
    pub fn new(radio: Transceiver, channel: CouplingChannel, rf: RfCanceller) -> Self {
        Self { radio, channel, rf }
    }

    /// Runs the chain for DAC signal `x`, an optional signal of interest at
    /// the receiver input, and noise drawn from `noise_seed`.
    pub fn run(
        &self,
        x: &ComplexBasebandSignal,
        soi: Option<&ComplexBasebandSignal>,
        noise_seed: RngSeed,
    ) -> Result<ChainComponents> {
        let r = &self.radio;
        let tx = r.transmit(x);
        let coupling = self.rf.residual_response(&self.channel);
        let k = r.lna.gain();
        let couple = |s: &ComplexBasebandSignal| x.with_samples(coupling.apply(s.samples())).scaled(k);

        let u_direct = couple(&tx.linear_direct);
        let u_image = couple(&tx.linear_image);
        let u_imd = couple(&tx.imd);
        let thermal = awgn(r.thermal_noise, x.len(), x.sample_rate(), noise_seed.derive(0, 0))?;
        let lna_noise = r.lna.noise(x.len(), x.sample_rate(), r.thermal_noise, noise_seed.derive(0, 1))?;
        let u_noise = thermal.scaled(k).add(&lna_noise)?;
        let u_soi = match soi {
            Some(s) => s.scaled(k),
            None => ComplexBasebandSignal::zeros(x.len(), x.sample_rate())?,
        };

        let direct = |u: &ComplexBasebandSignal| x.with_samples(r.rx_iq.g1().apply(u.samples()));
        let image = |u: &ComplexBasebandSignal| x.with_samples(r.rx_iq.g2().apply(u.conj().samples()));

        let linear_si = direct(&u_direct).add(&image(&u_image))?;
        let conj_si = direct(&u_image).add(&image(&u_direct))?;
        let imd = direct(&u_imd);
        let imd_image = image(&u_imd);
        let noise = direct(&u_noise);
        let noise_image = image(&u_noise);
        let soi = direct(&u_soi);
        let soi_image = image(&u_soi);

        let adc_input = sum(&[&linear_si, &conj_si, &imd, &imd_image, &noise, &noise_image, &soi, &soi_image]);
        let adc = apply_agc_adc(&r.adc, &adc_input)?;
        let output = adc.normalized();
        let quantization = output.sub(&adc_input)?;
        Ok(ChainComponents {
            linear_si,
            conj_si,
            imd,
            imd_image,
            noise,
            noise_image,
            soi,
            soi_image,
            quantization,
            output,
            vga_gain: adc.vga_gain,
            adc_input,
            pa_output: tx.pa_output(),
        })
    }

    /// Closed-form widely-linear responses from `x` to the ADC input,
    /// `(h1, h2)`, with unit VGA gain.
    pub fn wl_responses(&self) -> (Fir, Fir) {
        let r = &self.radio;
        let path = self.rf.residual_response(&self.channel).scaled(r.lna.gain());
        let pa = r.pa.memory.scaled(r.pa.alpha0);
        let via_direct = path.compose(&pa).compose(r.tx_iq.g1());
        let via_image = path.compose(&pa).compose(r.tx_iq.g2());
        let h1 = r.rx_iq.g1().compose(&via_direct).plus(&r.rx_iq.g2().compose(&via_image.conj()));
        let h2 = r.rx_iq.g1().compose(&via_image).plus(&r.rx_iq.g2().compose(&via_direct.conj()));
        (h1, h2)
    }

    /// Responses `(h_IMD, h_IMD,im)` from the mixer-output cubic term
    /// `x_IMD` and its conjugate to the ADC input.
    pub fn imd_responses(&self) -> (Fir, Fir) {
        let r = &self.radio;
        let path = self
            .rf
            .residual_response(&self.channel)
            .scaled(r.lna.gain())
            .compose(&r.pa.memory.scaled(r.pa.alpha1));
        (r.rx_iq.g1().compose(&path), r.rx_iq.g2().compose(&path.conj()))
    }
}
