//! Seeded simulation of the evolving-set process `S_{t+1} = (S_t)_u` with
//! `u` uniform on `[0, 1]`, and the checks that tie it to total variation
//! and to per-step f-congestion contraction.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::StochasticKernel;
use crate::exact::{CurveStart, MixingCurve};
use crate::iso::{full_mask, ConcaveFn, IsoError, Isoperimetry, VertexSet};
use crate::scalar::{pairwise_sum, Real};

/// Sampled inequalities pass within this many standard errors.
pub const SIGMA_MARGIN: f64 = 3.0;
/// Tolerance for the exact per-set identities.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvosetError {
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error("start state {start} out of range for {n} states")]
    InvalidStart { start: usize, n: usize },
    #[error("trace and curve describe different chains or start states")]
    MismatchedChain,
    #[error("need at least one trial")]
    NoTrials,
}

/// `{v : Q(S, v) >= u pi(v)}`. The empty and full sets are absorbing.
pub fn evolve_step<T: Real>(iso: &Isoperimetry<T>, s: &VertexSet<T>, u: T) -> VertexSet<T> {
    if s.is_empty() || s.is_full() {
        return *s;
    }
    let pi = iso.stationary();
    let q = iso.flows_from(s);
    let bits = (0..iso.n())
        .filter(|&v| q[v] >= u * pi[v])
        .fold(0u32, |acc, v| acc | 1 << v);
    iso.set_from_bits(bits)
}

/// Per-step sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

fn estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return Estimate { mean, se: 0.0 };
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    Estimate {
        mean,
        se: (var / n).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolvingSetTrace {
    pub seed: u64,
    pub start: usize,
    pub horizon: usize,
    /// Fingerprint of the simulated kernel.
    pub chain: u64,
    pub pi_start: f64,
    /// `sets[trial][t]` as bitmasks, `t = 0..=horizon`.
    pub sets: Vec<Vec<u32>>,
    /// `measures[trial][t] = pi(S_t)`.
    pub measures: Vec<Vec<f64>>,
}

impl EvolvingSetTrace {
    pub fn trials(&self) -> usize {
        self.sets.len()
    }

    fn column(&self, t: usize, g: impl Fn(f64) -> f64) -> Vec<f64> {
        self.measures.iter().map(|row| g(row[t])).collect()
    }

    /// Estimates of `E_t pi(S_t)(1 - pi(S_t)) / pi(x)`, an upper bound on
    /// `TV(t)` from start `x`.
    pub fn tv_estimates(&self) -> Vec<Estimate> {
        (0..=self.horizon)
            .map(|t| estimate(&self.column(t, |m| m * (1.0 - m) / self.pi_start)))
            .collect()
    }

    /// Estimates of `E_t f(pi(S_t^#))`.
    pub fn f_estimates(&self, f: ConcaveFn) -> Vec<Estimate> {
        (0..=self.horizon)
            .map(|t| estimate(&self.column(t, |m| f.eval(m.min(1.0 - m)))))
            .collect()
    }

    /// Distinct proper sets visited at `t < horizon` (those whose successor
    /// was drawn), ascending by bitmask.
    pub fn visited_sets(&self, n: usize) -> Vec<u32> {
        let full = full_mask(n);
        let mut seen = BTreeSet::new();
        for row in &self.sets {
            for &s in &row[..self.horizon] {
                if s != 0 && s != full {
                    seen.insert(s);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// CSV with header `trial,t,measure`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trial", "t", "measure"])?;
        for (i, row) in self.measures.iter().enumerate() {
            for (t, m) in row.iter().enumerate() {
                w.write_record([i.to_string(), t.to_string(), format!("{m:e}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `trials` independent runs of `horizon` steps from `S_0 = {start}`. Trial
/// `i` draws from its own ChaCha stream `(seed, i)`, so the result does not
/// depend on scheduling.
pub fn simulate<T: Real>(
    k: &StochasticKernel<T>,
    start: usize,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<EvolvingSetTrace, EvosetError> {
    let iso = Isoperimetry::new(k)?;
    simulate_with(&iso, k.fingerprint(), start, horizon, trials, seed)
}

pub fn simulate_with<T: Real>(
    iso: &Isoperimetry<T>,
    chain: u64,
    start: usize,
    horizon: usize,
    trials: usize,
    seed: u64,
) -> Result<EvolvingSetTrace, EvosetError> {
    let n = iso.n();
    if start >= n {
        return Err(EvosetError::InvalidStart { start, n });
    }
    if trials == 0 {
        return Err(EvosetError::NoTrials);
    }
    let sets: Vec<Vec<u32>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut s = iso.set_from_bits(1 << start);
            let mut row = Vec::with_capacity(horizon + 1);
            row.push(s.bits());
            for _ in 0..horizon {
                let u = T::lit(rng.random::<f64>());
                s = evolve_step(iso, &s, u);
                row.push(s.bits());
            }
            row
        })
        .collect();
    let measures = sets
        .iter()
        .map(|row| {
            row.iter()
                .map(|&b| iso.set_from_bits(b).measure().as_f64())
                .collect()
        })
        .collect();
    Ok(EvolvingSetTrace {
        seed,
        start,
        horizon,
        chain,
        pi_start: iso.stationary()[start].as_f64(),
        sets,
        measures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepVerdict {
    pub t: usize,
    /// Left side minus right side; the check passes when `excess <= margin`.
    pub excess: f64,
    pub margin: f64,
    pub passed: bool,
}

/// `E_t pi(S_t)(1 - pi(S_t)) / pi(x) + 3 SE >= TV(t)` at every `t` covered by
/// both the trace and the exact curve. The standard error is the larger of
/// the sample one and `sqrt(TV (M - TV) / N)`, the widest spread a summand in
/// `[0, M]`, `M = 1 / (4 pi(x))`, can have at mean `TV`; the sample SE alone
/// shrinks exactly when the sample mean comes out low, which makes chains
/// where domination is an equality fail far more often than 3 sigma implies.
/// Both are floored at `M / N` so degenerate steps do not demand equality.
pub fn tv_domination_check(
    trace: &EvolvingSetTrace,
    exact: &MixingCurve<f64>,
) -> Result<Vec<StepVerdict>, EvosetError> {
    if exact.chain != trace.chain || exact.start != CurveStart::State(trace.start) {
        return Err(EvosetError::MismatchedChain);
    }
    let n = trace.trials() as f64;
    let cap = 1.0 / (4.0 * trace.pi_start);
    Ok(trace
        .tv_estimates()
        .iter()
        .enumerate()
        .filter_map(|(t, e)| {
            let tv = exact.at(t)?;
            let null_se = (tv.clamp(0.0, cap) * (cap - tv).max(0.0) / n).sqrt();
            let margin = SIGMA_MARGIN * e.se.max(null_se).max(cap / n) + EXACT_TOL;
            let excess = tv - e.mean;
            Some(StepVerdict {
                t,
                excess,
                margin,
                passed: excess <= margin,
            })
        })
        .collect())
}

/// Sampled per-step contraction `E_t f(pi(S_t^#)) <= c E_{t-1} f(pi(S_{t-1}^#))`,
/// tested on the paired differences within 3 standard errors (floored at
/// `1 / N`).
pub fn contraction_check(trace: &EvolvingSetTrace, c_f: f64, f: ConcaveFn) -> Vec<StepVerdict> {
    let floor = 1.0 / trace.trials() as f64;
    (1..=trace.horizon)
        .map(|t| {
            let diffs: Vec<f64> = trace
                .measures
                .iter()
                .map(|row| {
                    f.eval(row[t].min(1.0 - row[t]))
                        - c_f * f.eval(row[t - 1].min(1.0 - row[t - 1]))
                })
                .collect();
            let e = estimate(&diffs);
            let margin = SIGMA_MARGIN * e.se.max(floor) + EXACT_TOL;
            StepVerdict {
                t,
                excess: e.mean,
                margin,
                passed: e.mean <= margin,
            }
        })
        .collect()
}

/// Exact one-step checks over every distinct visited set `S`:
/// `int_0^1 f(pi(S_u^#)) du <= f(pi(S^#)) C_f` and `int_0^1 pi(S_u) du = pi(S)`.
/// For `f` that are not reflection-dominated the folded step does not follow
/// from `C_f` and the unfolded `int f(pi(S_u)) du <= f(pi(S)) C_f` is checked
/// instead; pass [`Isoperimetry::contraction_c_f`] as `c_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactStepReport {
    pub sets_checked: usize,
    /// Largest `int f(pi(S_u^#)) du - C_f f(pi(S^#))` (unfolded for `f` that
    /// are not reflection-dominated).
    pub max_contraction_excess: f64,
    /// Witness set for `max_contraction_excess`.
    pub worst_set: u32,
    pub max_martingale_error: f64,
    pub passed: bool,
}

pub fn exact_step_check<T: Real>(
    iso: &Isoperimetry<T>,
    trace: &EvolvingSetTrace,
    f: ConcaveFn,
    c_f: f64,
) -> Result<ExactStepReport, EvosetError> {
    let mut report = ExactStepReport {
        sets_checked: 0,
        max_contraction_excess: f64::NEG_INFINITY,
        worst_set: 0,
        max_martingale_error: 0.0,
        passed: true,
    };
    for bits in trace.visited_sets(iso.n()) {
        let s = iso.set_from_bits(bits);
        let view = iso.view(&s)?;
        let m = s.measure().as_f64();
        let excess = if f.reflection_dominated() {
            view.integrate_folded(f).as_f64() - c_f * f.eval_split(m.min(1.0 - m), m.max(1.0 - m))
        } else {
            view.integrate(f).as_f64()
                - c_f
                    * f.eval_split(s.measure(), view.complement_measure())
                        .as_f64()
        };
        if excess > report.max_contraction_excess {
            report.max_contraction_excess = excess;
            report.worst_set = bits;
        }
        let drift = (view.profile_integral().as_f64() - m).abs();
        report.max_martingale_error = report.max_martingale_error.max(drift);
        report.sets_checked += 1;
    }
    report.passed =
        report.max_contraction_excess <= EXACT_TOL && report.max_martingale_error <= EXACT_TOL;
    Ok(report)
}
