//! Least-squares channel estimation and digital cancellation.

use nalgebra::{DMatrix, DVector};

use crate::cancel::matrix::AugmentedDataMatrix;
use crate::error::{Error, Result};
use crate::signal::{ComplexBasebandSignal, Fir, C64};

/// Condition number above which the data matrix counts as rank deficient.
pub const MAX_CONDITION: f64 = 1e10;

/// Widely-linear FIR pair; tap `j` of each acts at lag `j - precursor`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub h1: Vec<C64>,
    pub h2: Vec<C64>,
    pub precursor: usize,
}

impl ChannelEstimate {
    pub fn new(h1: Vec<C64>, h2: Vec<C64>, precursor: usize) -> Result<Self> {
        if h1.len() != h2.len() || h1.is_empty() || precursor >= h1.len() {
            return Err(Error::Config(format!(
                "estimate needs equal non-empty branches with K < M (got {}, {}, K = {precursor})",
                h1.len(),
                h2.len()
            )));
        }
        Ok(Self { h1, h2, precursor })
    }

    pub fn taps(&self) -> usize {
        self.h1.len()
    }

    pub fn direct(&self) -> Fir {
        Fir::with_lead(self.h1.clone(), self.precursor)
    }

    pub fn conjugate(&self) -> Fir {
        Fir::with_lead(self.h2.clone(), self.precursor)
    }

    /// Stacked `[h1; h2]`.
    pub fn stacked(&self) -> Vec<C64> {
        self.h1.iter().chain(&self.h2).copied().collect()
    }

    /// Reconstruction `h1 ⋆ x + h2 ⋆ x*` over the whole buffer.
    pub fn predict(&self, x: &ComplexBasebandSignal) -> ComplexBasebandSignal {
        let a = self.direct().apply(x.samples());
        let b = self.conjugate().apply(x.conj().samples());
        x.with_samples(a.into_iter().zip(b).map(|(p, q)| p + q).collect())
    }
}

/// Solves `min ||A h - b||` by column-pivoted QR.
pub fn solve_least_squares(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<DVector<C64>> {
    let cols = a.ncols();
    if a.nrows() < cols {
        return Err(Error::Singular { condition: f64::INFINITY });
    }
    let qr = a.clone().col_piv_qr();
    let r = qr.r();
    let sv = r.singular_values();
    let (max, min) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Singular { condition });
    }
    let mut qb = b.clone();
    qr.q_tr_mul(&mut qb);
    let top = qb.rows(0, cols).into_owned();
    let mut h = r
        .solve_upper_triangular(&top)
        .ok_or(Error::Singular { condition: f64::INFINITY })?;
    qr.p().inv_permute_rows(&mut h);
    Ok(h)
}

/// Widely-linear LS: fits both blocks and splits the stacked solution.
pub fn estimate_wl_ls(m: &AugmentedDataMatrix) -> Result<ChannelEstimate> {
    let h = solve_least_squares(&m.data, &m.reference)?;
    let taps = m.taps;
    ChannelEstimate::new(h.rows(0, taps).iter().copied().collect(), h.rows(taps, taps).iter().copied().collect(), m.precursor)
}

/// Conventional linear LS: fits the direct block only, conjugate taps zero.
pub fn estimate_linear_ls(m: &AugmentedDataMatrix) -> Result<ChannelEstimate> {
    let h = solve_least_squares(&m.direct(), &m.reference)?;
    ChannelEstimate::new(h.iter().copied().collect(), vec![C64::new(0.0, 0.0); m.taps], m.precursor)
}

/// `y - h1 ⋆ x - h2 ⋆ x*`.
pub fn apply_cancellation(
    est: &ChannelEstimate,
    x: &ComplexBasebandSignal,
    y: &ComplexBasebandSignal,
) -> Result<ComplexBasebandSignal> {
    if x.len() != y.len() {
        return Err(Error::Alignment(format!("x has {} samples, y has {}", x.len(), y.len())));
    }
    y.sub(&est.predict(x))
}
