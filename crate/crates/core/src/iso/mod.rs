//! Exhaustive set-expansion quantities over all subsets of a small state
//! space: ergodic flow, level-set profiles, the area/flow quantity Psi and
//! its capped variant, subset-measure gaps, vertex expansion and the
//! f-congestion profile.

mod analyzer;
mod profile;
mod view;

pub use analyzer::{ExpansionKind, ExpansionOutcome, IsoperimetricSummary, Isoperimetry};
pub use profile::{CongestionProfile, LevelSetProfile};
pub use view::SetView;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainError, StochasticKernel};
use crate::scalar::Real;

/// Largest state space the subset enumerations accept.
pub const MAX_SUBSET_STATES: usize = 20;

/// Measures within this distance of 1/2 count as `<= 1/2`.
pub(crate) const HALF_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsoError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("{n} states exceeds the subset-enumeration limit of {limit}")]
    StateSpaceTooLarge { n: usize, limit: usize },
    #[error("the set must be nonempty and proper")]
    EmptyOrFullSet,
    #[error("f(pi(A)) is zero")]
    ZeroDenominator,
    #[error("invalid vertex set: {0}")]
    InvalidSet(String),
}

/// Subset of the state space as a bitmask, with its stationary measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexSet<T> {
    bits: u32,
    n: usize,
    measure: T,
}

impl<T: Real> VertexSet<T> {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn measure(&self) -> T {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == full_mask(self.n)
    }

    pub fn is_proper(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.bits >> v & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        members(self.bits, self.n)
    }
}

pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn members(bits: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|v| bits >> v & 1 == 1).collect()
}

/// The concave functions the congestion quantity is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcaveFn {
    /// `sin(pi a)`
    SinPi,
    /// `a (1 - a)`
    AOneMinusA,
    /// `a log(1/a)`
    ALogInvA,
    /// `sqrt(a (1 - a))`
    SqrtAOneMinusA,
}

impl ConcaveFn {
    pub const ALL: [ConcaveFn; 4] = [
        Self::SinPi,
        Self::AOneMinusA,
        Self::ALogInvA,
        Self::SqrtAOneMinusA,
    ];

    pub fn eval<T: Real>(self, a: T) -> T {
        let a = a.max(T::zero()).min(T::one());
        self.eval_split(a, T::one() - a)
    }

    /// `f(a)` given both `a` and `b = 1 - a`, each summed independently, so
    /// that a measure that should be exactly 1 does not leave a rounding
    /// residue that `sqrt` or `log` would amplify.
    pub fn eval_split<T: Real>(self, a: T, b: T) -> T {
        let a = a.max(T::zero()).min(T::one());
        let b = b.max(T::zero()).min(T::one());
        match self {
            Self::SinPi => (T::PI() * a.min(b)).sin().max(T::zero()),
            Self::AOneMinusA => a * b,
            Self::ALogInvA => {
                if a <= T::zero() {
                    T::zero()
                } else if a > T::lit(0.5) {
                    -a * (-b).ln_1p()
                } else {
                    -a * a.ln()
                }
            }
            Self::SqrtAOneMinusA => (a * b).sqrt(),
        }
    }

    /// `f(a) <= f(1 - a)` on `(0, 1/2]`. When this holds the contraction
    /// can track `S^#` and `C_f` is maximized over `pi(A) <= 1/2`; otherwise
    /// the unfolded set is tracked and `C_f` is maximized over all sets.
    pub fn reflection_dominated(self) -> bool {
        !matches!(self, Self::ALogInvA)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SinPi => "sin_pi",
            Self::AOneMinusA => "a_one_minus_a",
            Self::ALogInvA => "a_log_inv_a",
            Self::SqrtAOneMinusA => "sqrt_a_one_minus_a",
        }
    }
}

impl std::fmt::Display for ConcaveFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ConcaveFn {
    type Err = IsoError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| IsoError::InvalidSet(format!("unknown function `{s}`")))
    }
}

/// Exhaustive summary in one call.
pub fn summarize<T: Real>(k: &StochasticKernel<T>) -> Result<IsoperimetricSummary<T>, IsoError> {
    Isoperimetry::new(k)?.summarize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concave_functions_vanish_at_endpoints() {
        for f in ConcaveFn::ALL {
            assert_eq!(f.eval(0.0f64), 0.0);
            assert!(f.eval(1.0f64).abs() < 1e-15);
            assert!(f.eval(0.3f64) > 0.0);
            assert_eq!(f.name().parse::<ConcaveFn>().unwrap(), f);
        }
        assert!((ConcaveFn::SinPi.eval(0.5f64) - 1.0).abs() < 1e-15);
        assert!((ConcaveFn::ALogInvA.eval(0.5f64) - 0.5 * 2f64.ln()).abs() < 1e-15);
    }
}
