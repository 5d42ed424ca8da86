//! Covariance-windowed augmented data matrix `[X X*]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::signal::{ComplexBasebandSignal, C64};

/// Least-squares system for `M` direct and `M` conjugate taps, `K` of them
/// pre-cursor.
///
/// Row `r` regresses `y(M-1+r)` on `x(M+K-1+r-j)` for `j = 0..M` (left
/// block) and the conjugates of the same samples (right block). Tap `j`
/// therefore acts at lag `j - K`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDataMatrix {
    pub data: DMatrix<C64>,
    pub reference: DVector<C64>,
    pub taps: usize,
    pub precursor: usize,
}

impl AugmentedDataMatrix {
    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    /// Index into `y` of the first reference sample.
    pub fn first_reference(&self) -> usize {
        self.taps - 1
    }

    /// The direct block `X`.
    pub fn direct(&self) -> DMatrix<C64> {
        self.data.columns(0, self.taps).into_owned()
    }
}

pub fn check_dimensions(samples: usize, taps: usize, precursor: usize) -> Result<()> {
    if taps == 0 || precursor >= taps {
        return Err(Error::Config(format!(
            "need 0 <= K < M, got M = {taps}, K = {precursor}"
        )));
    }
    if samples <= 2 * taps + precursor {
        return Err(Error::InsufficientData { samples, taps, precursor });
    }
    Ok(())
}

/// Builds `[X X*]` and the aligned reference vector from equally long `x`
/// and `y`.
pub fn build_augmented_matrix(
    x: &ComplexBasebandSignal,
    y: &ComplexBasebandSignal,
    taps: usize,
    precursor: usize,
) -> Result<AugmentedDataMatrix> {
    if x.len() != y.len() {
        return Err(Error::Alignment(format!("x has {} samples, y has {}", x.len(), y.len())));
    }
    let n = x.len();
    check_dimensions(n, taps, precursor)?;
    let rows = n - taps - precursor + 1;
    let xs = x.samples();
    let data = DMatrix::from_fn(rows, 2 * taps, |r, c| {
        let j = c % taps;
        let v = xs[taps + precursor - 1 + r - j];
        if c < taps {
            v
        } else {
            v.conj()
        }
    });
    let reference = DVector::from_iterator(rows, y.samples()[taps - 1..taps - 1 + rows].iter().copied());
    Ok(AugmentedDataMatrix { data, reference, taps, precursor })
}
