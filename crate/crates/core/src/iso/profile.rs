use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ConcaveFn;
use crate::scalar::Real;

/// The step function `u -> pi(A_u)` on `[0, 1]`.
///
/// `breakpoints[i] = (u_i, m_i)` means `pi(A_u) = m_i` for `u` in
/// `(u_i, u_{i+1}]` (the first interval also contains `u = 0`, the last ends
/// at 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetProfile<T> {
    breakpoints: Vec<(T, T)>,
    source_measure: T,
}

impl<T: Real> LevelSetProfile<T> {
    pub(crate) fn from_segments(breakpoints: Vec<(T, T)>, source_measure: T) -> Self {
        Self {
            breakpoints,
            source_measure,
        }
    }

    pub fn breakpoints(&self) -> &[(T, T)] {
        &self.breakpoints
    }

    /// `pi(A)` of the set the profile belongs to.
    pub fn source_measure(&self) -> T {
        self.source_measure
    }

    /// `(lo, hi, measure)` triples covering `[0, 1]`.
    pub fn segments(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.breakpoints.iter().enumerate().map(|(i, &(lo, m))| {
            let hi = self.breakpoints.get(i + 1).map_or(T::one(), |b| b.0);
            (lo, hi, m)
        })
    }

    pub fn measure_at(&self, u: T) -> T {
        self.segments()
            .find(|&(lo, hi, _)| u <= hi && (u > lo || lo == T::zero()))
            .map_or(T::zero(), |s| s.2)
    }

    /// `int_0^1 pi(A_u) du`.
    pub fn integral(&self) -> T {
        self.segments().map(|(lo, hi, m)| (hi - lo) * m).sum()
    }

    /// `int_0^1 f(pi(A_u)) du`, exact on each segment.
    pub fn integrate(&self, f: ConcaveFn) -> T {
        self.segments()
            .map(|(lo, hi, m)| (hi - lo) * f.eval(m))
            .sum()
    }

    /// `1/2 int_0^1 |pi(A_u) - pi(A)| du`.
    pub fn area(&self) -> T {
        let a = self.source_measure;
        T::lit(0.5)
            * self
                .segments()
                .map(|(lo, hi, m)| (hi - lo) * (m - a).abs())
                .sum::<T>()
    }
}

/// `r -> C_f(r)`, the largest congestion over sets of measure at most `r`,
/// as a nondecreasing step function over the achievable set measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongestionProfile<T> {
    pub f: ConcaveFn,
    /// `(r, C_f(r))` with `r` strictly increasing.
    pub points: Vec<(T, T)>,
}

impl<T: Real> CongestionProfile<T> {
    /// Builds the running maximum from per-set `(measure, congestion)` pairs.
    /// Measures closer than `1e-12` are merged.
    pub fn from_sets(f: ConcaveFn, mut sets: Vec<(T, T)>) -> Self {
        sets.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let tol = T::lit(1e-12);
        let mut points: Vec<(T, T)> = Vec::new();
        for (r, c) in sets {
            match points.last_mut() {
                Some(last) if r - last.0 <= tol => last.1 = last.1.max(c),
                Some(last) => {
                    let running = last.1.max(c);
                    points.push((r, running));
                }
                None => points.push((r, c)),
            }
        }
        Self { f, points }
    }

    /// `C_f(r)`; `None` below the smallest achievable measure.
    pub fn at(&self, r: T) -> Option<T> {
        let tol = T::lit(1e-12);
        self.points
            .iter()
            .take_while(|p| p.0 <= r + tol)
            .last()
            .map(|p| p.1)
    }

    pub fn min_measure(&self) -> Option<T> {
        self.points.first().map(|p| p.0)
    }

    /// CSV with header `r,C_f(r)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "C_f(r)"])?;
        for (r, c) in &self.points {
            w.write_record([format!("{:e}", r.as_f64()), format!("{:e}", c.as_f64())])?;
        }
        w.flush()?;
        Ok(())
    }
}
