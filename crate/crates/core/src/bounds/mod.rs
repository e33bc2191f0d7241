//! Closed-form mixing, eigenvalue and spectral-gap bounds evaluated from
//! isoperimetric inputs, plus the worst-case level-set profiles behind them.
//!
//! Bounds are reported in `f64` whatever scalar the analysis ran in.

mod formulas;
mod integral;
mod profile;
mod report;

pub use formulas::{
    congestion_contraction, congestion_distance_bounds, congestion_gap_bound,
    congestion_gap_profile, eulerian_max_degree, eulerian_simple, isoperimetric_general,
    linf_composition_bound, psi_delta_bounds, tv_lower_bound_steps, ContractionBound, GapForm,
    IsoInputs,
};
pub use integral::{evoset_integral_bound, CongestionCurve, DistanceIntegral, IntegralBound};
pub use profile::{worst_case_bound, worst_case_profile, ProfileCase, WorstCaseProfile};
pub use report::{BoundEntry, BoundReport, BoundSource, Quantity};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("congestion {0} is not below 1; the bound is vacuous")]
    ContractionNotStrict(f64),
    #[error("the bound is vacuous: {0}")]
    VacuousBound(String),
    #[error("invalid profile parameters: {0}")]
    InvalidProfileParameters(String),
    #[error("congestion profile reaches 1 at r = {0}; the integral diverges")]
    ProfileTouchesOne(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
