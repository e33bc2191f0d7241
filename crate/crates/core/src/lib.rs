//! Exact and bound-based mixing analysis for small finite Markov chains:
//! spectra and mixing times by matrix powering, exhaustive set-expansion
//! quantities, the bounds built from them, evolving-set simulation and a
//! harness that checks every bound against the exact answer.

pub mod bounds;
pub mod chain;
pub mod evoset;
pub mod exact;
pub mod iso;
pub mod matrix;
pub mod scalar;
pub mod verify;

pub type Kernel = chain::StochasticKernel<f64>;
pub type Kernel32 = chain::StochasticKernel<f32>;
pub type Stationary = chain::Distribution<f64>;
pub type Stationary32 = chain::Distribution<f32>;
pub type Analyzer = iso::Isoperimetry<f64>;
pub type Analyzer32 = iso::Isoperimetry<f32>;
pub type Summary = iso::IsoperimetricSummary<f64>;
pub type Summary32 = iso::IsoperimetricSummary<f32>;
pub type Curve = exact::MixingCurve<f64>;
pub type Curve32 = exact::MixingCurve<f32>;
