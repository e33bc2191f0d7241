use std::io::Write;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::chain::{stationary, StochasticKernel};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    /// `1/2 sum |sigma - pi|`
    Tv,
    /// `sqrt(sum pi (sigma/pi - 1)^2)`
    L2,
    /// `max |sigma/pi - 1|`
    Linf,
    /// `sum sigma log(sigma/pi)`
    RelativeEntropy,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 4] = [Self::Tv, Self::L2, Self::Linf, Self::RelativeEntropy];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tv => "tv",
            Self::L2 => "l2",
            Self::Linf => "linf",
            Self::RelativeEntropy => "entropy",
        }
    }
}

impl std::str::FromStr for DistanceKind {
    type Err = AnalysisError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tv" => Ok(Self::Tv),
            "l2" => Ok(Self::L2),
            "linf" => Ok(Self::Linf),
            "entropy" | "relative_entropy" | "relative-entropy" => Ok(Self::RelativeEntropy),
            other => Err(AnalysisError::UnknownDistance(other.to_string())),
        }
    }
}

/// Distance of `sigma` from `pi`; `pi` must be strictly positive.
pub fn distance<T: Real>(sigma: &[T], pi: &[T], kind: DistanceKind) -> Result<T, AnalysisError> {
    if let Some(x) = pi.iter().position(|w| *w <= T::zero()) {
        return Err(AnalysisError::ZeroStationaryMass(x));
    }
    let ratios = sigma.iter().zip(pi).map(|(s, p)| (*s, *p, *s / *p));
    let d = match kind {
        DistanceKind::Tv => T::lit(0.5) * ratios.map(|(s, p, _)| (s - p).abs()).sum::<T>(),
        DistanceKind::L2 => ratios
            .map(|(_, p, r)| p * (r - T::one()) * (r - T::one()))
            .sum::<T>()
            .sqrt(),
        DistanceKind::Linf => ratios
            .map(|(_, _, r)| (r - T::one()).abs())
            .fold(T::zero(), T::max),
        DistanceKind::RelativeEntropy => ratios
            .map(|(s, _, r)| {
                if s <= T::zero() {
                    T::zero()
                } else {
                    s * r.ln()
                }
            })
            .sum::<T>()
            .max(T::zero()),
    };
    Ok(d)
}

/// Which start state a curve follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveStart {
    /// Maximum over all single-state starts.
    Worst,
    State(usize),
}

/// Distance to stationarity after `t = 0..=t_max` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCurve<T> {
    pub kind: DistanceKind,
    pub start: CurveStart,
    pub values: Vec<T>,
    /// Fingerprint of the kernel the curve was computed for.
    pub chain: u64,
}

impl<T: Real> MixingCurve<T> {
    pub fn at(&self, t: usize) -> Option<T> {
        self.values.get(t).copied()
    }

    /// First step at which the distance is at most `eps`.
    pub fn first_below(&self, eps: T) -> Option<usize> {
        self.values.iter().position(|d| reached(*d, eps))
    }

    /// CSV with header `t,distance`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "distance"])?;
        for (t, d) in self.values.iter().enumerate() {
            w.write_record([t.to_string(), format!("{:e}", d.as_f64())])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Worst-start curve over `t = 0..=t_max`.
pub fn mixing_curve<T: Real>(
    k: &StochasticKernel<T>,
    kind: DistanceKind,
    t_max: usize,
) -> Result<MixingCurve<T>, AnalysisError> {
    let pi = stationary(k)?;
    let mut walker = Walker::new(k, (0..k.n()).collect());
    let mut values = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            walker.step(k);
        }
        values.push(walker.worst(pi.as_slice(), kind)?);
    }
    Ok(MixingCurve {
        kind,
        start: CurveStart::Worst,
        values,
        chain: k.fingerprint(),
    })
}

/// Curve for a single start state.
pub fn mixing_curve_from<T: Real>(
    k: &StochasticKernel<T>,
    start: usize,
    kind: DistanceKind,
    t_max: usize,
) -> Result<MixingCurve<T>, AnalysisError> {
    if start >= k.n() {
        return Err(AnalysisError::InvalidState(start));
    }
    let pi = stationary(k)?;
    let mut walker = Walker::new(k, vec![start]);
    let mut values = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            walker.step(k);
        }
        values.push(walker.worst(pi.as_slice(), kind)?);
    }
    Ok(MixingCurve {
        kind,
        start: CurveStart::State(start),
        values,
        chain: k.fingerprint(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "steps")]
pub enum MixingTime {
    Reached(usize),
    /// Distance still above `eps` after the given number of steps.
    NotReached(usize),
}

impl MixingTime {
    pub fn steps(self) -> Option<usize> {
        match self {
            Self::Reached(t) => Some(t),
            Self::NotReached(_) => None,
        }
    }
}

/// `d <= eps` up to a few ulps, so that exact ties (e.g. `d(t) = eps` on
/// the complete graph) are not lost to rounding in the matrix powers.
fn reached<T: Real>(d: T, eps: T) -> bool {
    d <= eps * (T::one() + T::lit(16.0) * T::epsilon())
}

/// Smallest `t <= t_max` with worst-start distance at most `eps`.
pub fn exact_mixing_time<T: Real>(
    k: &StochasticKernel<T>,
    kind: DistanceKind,
    eps: T,
    t_max: usize,
) -> Result<MixingTime, AnalysisError> {
    if eps <= T::zero() {
        return Err(AnalysisError::NonPositiveEpsilon);
    }
    let pi = stationary(k)?;
    let mut walker = Walker::new(k, (0..k.n()).collect());
    for t in 0..=t_max {
        if t > 0 {
            walker.step(k);
        }
        if reached(walker.worst(pi.as_slice(), kind)?, eps) {
            return Ok(MixingTime::Reached(t));
        }
    }
    Ok(MixingTime::NotReached(t_max))
}

/// Exact mixing times for several thresholds in one pass.
pub fn exact_mixing_times<T: Real>(
    k: &StochasticKernel<T>,
    kind: DistanceKind,
    eps: &[T],
    t_max: usize,
) -> Result<Vec<MixingTime>, AnalysisError> {
    if eps.iter().any(|e| *e <= T::zero()) {
        return Err(AnalysisError::NonPositiveEpsilon);
    }
    let pi = stationary(k)?;
    let mut out: Vec<Option<usize>> = vec![None; eps.len()];
    let mut walker = Walker::new(k, (0..k.n()).collect());
    for t in 0..=t_max {
        if t > 0 {
            walker.step(k);
        }
        let d = walker.worst(pi.as_slice(), kind)?;
        for (slot, e) in out.iter_mut().zip(eps) {
            if slot.is_none() && reached(d, *e) {
                *slot = Some(t);
            }
        }
        if out.iter().all(Option::is_some) {
            break;
        }
    }
    Ok(out
        .into_iter()
        .map(|s| s.map_or(MixingTime::NotReached(t_max), MixingTime::Reached))
        .collect())
}

/// Rows `P^t(x, .)` for a set of starts, advanced one step at a time.
struct Walker<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> Walker<T> {
    fn new(k: &StochasticKernel<T>, starts: Vec<usize>) -> Self {
        let n = k.n();
        let rows = starts
            .into_iter()
            .map(|x| {
                let mut r = vec![T::zero(); n];
                r[x] = T::one();
                r
            })
            .collect();
        Self { rows }
    }

    fn step(&mut self, k: &StochasticKernel<T>) {
        for r in &mut self.rows {
            *r = k.matrix().left_mul(r);
        }
    }

    fn worst(&self, pi: &[T], kind: DistanceKind) -> Result<T, AnalysisError> {
        let mut worst = T::zero();
        for r in &self.rows {
            worst = worst.max(distance(r, pi, kind)?);
        }
        Ok(worst)
    }
}
