//! Ground truth: complex spectra, spectral gaps, distances to stationarity
//! and exact mixing times by matrix powering.

mod eigen;
mod mixing;
mod spectrum;

pub use eigen::symmetric_eigenvalues;
pub use mixing::{
    distance, exact_mixing_time, exact_mixing_times, mixing_curve, mixing_curve_from, CurveStart,
    DistanceKind, MixingCurve, MixingTime,
};
pub use spectrum::{
    circulant_spectrum, matrix_spectrum, max_matched_modulus_error, spectral_gap,
    spectral_gap_via_qr, spectrum, Spectrum, MAX_SPECTRUM_STATES,
};

use thiserror::Error;

use crate::chain::ChainError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("{n} states exceeds the limit of {limit}")]
    StateSpaceTooLarge { n: usize, limit: usize },
    #[error("QR iteration did not converge after {sweeps} sweeps ({} eigenvalues found)", partial.len())]
    NoConvergence {
        sweeps: usize,
        partial: Vec<(f64, f64)>,
    },
    #[error("stationary distribution has zero mass at state {0}")]
    ZeroStationaryMass(usize),
    #[error("state {0} out of range")]
    InvalidState(usize),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("unknown distance kind `{0}`")]
    UnknownDistance(String),
}
