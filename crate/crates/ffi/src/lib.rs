//! C ABI over the `fdsic` library.
//!
//! Every entry point returns an [`FdsicStatus`]. On failure a human-readable
//! message is kept per thread and can be read with
//! [`fdsic_last_error_message`]. Objects are opaque handles created by a
//! `*_new` or producing call and released with the matching `*_free`.
//! Complex samples cross the boundary as interleaved [`FdsicComplex`] arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fdsic::budget::{compute_budget, LdcPolicy};
use fdsic::cancel::{apply_cancellation, build_augmented_matrix, estimate_linear_ls, estimate_wl_ls, ChannelEstimate};
use fdsic::{ComplexBasebandSignal, Error, SystemParameters, C64};

/// Result of every call. Zero means success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdsicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientData = 3,
    Singular = 4,
    InfeasibleRfTarget = 5,
    Alignment = 6,
    Io = 7,
    Panic = 8,
}

/// Scalar system parameters settable through [`fdsic_params_set`].
/// Units follow the library: dBm for powers, dB for gains and ratios.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdsicParam {
    TxPower = 0,
    SoiPower = 1,
    PaGain = 2,
    PaIip3 = 3,
    AntennaAttenuation = 4,
    RfCancellation = 5,
    LnaGain = 6,
    IrrTx = 7,
    IrrRx = 8,
    AdcBits = 9,
    Papr = 10,
    NoiseFigure = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FdsicComplex {
    pub re: f64,
    pub im: f64,
}

/// Power budget at one transmit power, all in dBm except the last two (dB).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FdsicBudget {
    pub tx_dbm: f64,
    pub p_si: f64,
    pub p_si_im: f64,
    pub p_imd: f64,
    pub p_imd_im: f64,
    pub p_noise: f64,
    pub p_noise_im: f64,
    pub p_q: f64,
    pub p_soi: f64,
    pub p_si_before_ldc: f64,
    pub required_ldc: f64,
    pub sinr: f64,
}

/// Opaque system parameter set.
pub struct FdsicParams(SystemParameters);

/// Opaque fitted canceller.
pub struct FdsicEstimate(ChannelEstimate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FdsicStatus {
    match e {
        Error::Config(_) | Error::Domain(_) => FdsicStatus::InvalidArgument,
        Error::InsufficientData { .. } => FdsicStatus::InsufficientData,
        Error::Singular { .. } => FdsicStatus::Singular,
        Error::InfeasibleRfTarget { .. } => FdsicStatus::InfeasibleRfTarget,
        Error::Alignment(_) => FdsicStatus::Alignment,
        Error::Io(_) => FdsicStatus::Io,
        Error::Scenario { source, .. } => status_of(source),
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FdsicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FdsicStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            FdsicStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            FdsicStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn samples(p: *const FdsicComplex, len: usize, what: &'static str) -> Result<ComplexBasebandSignal, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    let v = std::slice::from_raw_parts(p, len).iter().map(|c| C64::new(c.re, c.im)).collect();
    Ok(ComplexBasebandSignal::new(v, 1.0)?)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fdsic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fdsic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a parameter set holding the baseline values.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fdsic_params_new(out: *mut *mut FdsicParams) -> FdsicStatus {
    guard(|| {
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        *out = Box::into_raw(Box::new(FdsicParams(SystemParameters::default())));
        Ok(())
    })
}

/// # Safety
/// `params` must come from [`fdsic_params_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fdsic_params_free(params: *mut FdsicParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Sets one parameter. Changing the noise figure moves the sensitivity
/// with it. The whole set is validated; on error it is left
/// unchanged.
///
/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fdsic_params_set(params: *mut FdsicParams, key: FdsicParam, value: f64) -> FdsicStatus {
    guard(|| {
        let h = params.as_mut().ok_or(Fail::Null("params"))?;
        let mut p = h.0.clone();
        match key {
            FdsicParam::TxPower => p.tx_power = value,
            FdsicParam::SoiPower => p.soi_power = value,
            FdsicParam::PaGain => p.pa_gain = value,
            FdsicParam::PaIip3 => p.pa_iip3 = value,
            FdsicParam::AntennaAttenuation => p.antenna_attenuation = value,
            FdsicParam::RfCancellation => p.rf_cancellation = value,
            FdsicParam::LnaGain => p.lna_gain = value,
            FdsicParam::IrrTx => p.irr_tx = value,
            FdsicParam::IrrRx => p.irr_rx = value,
            FdsicParam::AdcBits => {
                if !((1.0..=32.0).contains(&value) && value.fract() == 0.0) {
                    return Err(Error::Config(format!("ADC bits must be an integer in 1..=32, got {value}")).into());
                }
                p.adc_bits = value as u32
            }
            FdsicParam::Papr => p.papr = value,
            FdsicParam::NoiseFigure => {
                // Sensitivity follows the noise figure.
                p.sensitivity += value - p.noise_figure;
                p.noise_figure = value
            }
        }
        p.validate()?;
        h.0 = p;
        Ok(())
    })
}

/// Closed-form power budget at `tx_dbm`, with linear digital cancellation
/// chosen to push the linear SI 3 dB below the noise floor.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fdsic_budget(params: *const FdsicParams, tx_dbm: f64, out: *mut FdsicBudget) -> FdsicStatus {
    guard(|| {
        let p = deref(params, "params")?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        let b = compute_budget(&p.0.with_tx_power(tx_dbm), LdcPolicy::default())?;
        *out = FdsicBudget {
            tx_dbm: b.tx_dbm,
            p_si: b.p_si,
            p_si_im: b.p_si_im,
            p_imd: b.p_imd,
            p_imd_im: b.p_imd_im,
            p_noise: b.p_noise,
            p_noise_im: b.p_noise_im,
            p_q: b.p_q,
            p_soi: b.p_soi,
            p_si_before_ldc: b.p_si_before_ldc,
            required_ldc: b.required_ldc,
            sinr: b.sinr,
        };
        Ok(())
    })
}

/// Least-squares fit of `y` from `x` with `taps` taps per branch, of which
/// `precursor` precede the current sample. With `widely_linear` false the
/// conjugate branch is fixed at zero.
///
/// # Safety
/// `x` and `y` must each point to `len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fdsic_estimate(
    x: *const FdsicComplex,
    y: *const FdsicComplex,
    len: usize,
    taps: usize,
    precursor: usize,
    widely_linear: bool,
    out: *mut *mut FdsicEstimate,
) -> FdsicStatus {
    guard(|| {
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        let (x, y) = (samples(x, len, "x")?, samples(y, len, "y")?);
        let m = build_augmented_matrix(&x, &y, taps, precursor)?;
        let est = if widely_linear { estimate_wl_ls(&m)? } else { estimate_linear_ls(&m)? };
        *out = Box::into_raw(Box::new(FdsicEstimate(est)));
        Ok(())
    })
}

/// # Safety
/// `est` must come from [`fdsic_estimate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fdsic_estimate_free(est: *mut FdsicEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

/// Number of taps per branch.
///
/// # Safety
/// `est` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn fdsic_estimate_taps(est: *const FdsicEstimate) -> usize {
    est.as_ref().map_or(0, |e| e.0.taps())
}

/// Copies the direct and conjugate taps, `fdsic_estimate_taps` each.
///
/// # Safety
/// `direct` and `conjugate` must each have room for that many elements.
#[no_mangle]
pub unsafe extern "C" fn fdsic_estimate_coefficients(
    est: *const FdsicEstimate,
    direct: *mut FdsicComplex,
    conjugate: *mut FdsicComplex,
) -> FdsicStatus {
    guard(|| {
        let e = deref(est, "est")?;
        if direct.is_null() || conjugate.is_null() {
            return Err(Fail::Null("coefficient buffer"));
        }
        let m = e.0.taps();
        for (i, c) in e.0.stacked().into_iter().enumerate() {
            let dst = if i < m { direct.add(i) } else { conjugate.add(i - m) };
            *dst = FdsicComplex { re: c.re, im: c.im };
        }
        Ok(())
    })
}

/// Writes `y - h1 * x - h2 * conj(x)` to `out`.
///
/// # Safety
/// `x`, `y` and `out` must each point to `len` elements.
#[no_mangle]
pub unsafe extern "C" fn fdsic_cancel(
    est: *const FdsicEstimate,
    x: *const FdsicComplex,
    y: *const FdsicComplex,
    len: usize,
    out: *mut FdsicComplex,
) -> FdsicStatus {
    guard(|| {
        let e = deref(est, "est")?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let (x, y) = (samples(x, len, "x")?, samples(y, len, "y")?);
        let r = apply_cancellation(&e.0, &x, &y)?;
        for (i, c) in r.samples().iter().enumerate() {
            *out.add(i) = FdsicComplex { re: c.re, im: c.im };
        }
        Ok(())
    })
}
