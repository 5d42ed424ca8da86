//! Linear and widely-linear least-squares digital SI cancellation.

pub mod estimate;
pub mod matrix;
pub mod metrics;

pub use estimate::{apply_cancellation, estimate_linear_ls, estimate_wl_ls, solve_least_squares, ChannelEstimate};
pub use matrix::{build_augmented_matrix, AugmentedDataMatrix};
pub use metrics::{measure_digital_attenuation, measure_sinr};
