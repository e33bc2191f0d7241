use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{ChainAnalysis, ChainAnalysisError};
use super::suite::{SuiteChain, WalkFamily};
use crate::bounds::{tv_lower_bound_steps, worst_case_bound, BoundEntry, BoundSource, Quantity};
use crate::evoset::{exact_step_check, simulate_with, tv_domination_check, EvosetError};
use crate::exact::{
    exact_mixing_times, mixing_curve_from, AnalysisError, DistanceKind, MixingTime,
};
use crate::iso::{full_mask, ConcaveFn, IsoError, Isoperimetry};

/// Slack on real-valued gap comparisons.
pub const GAP_TOL: f64 = 1e-10;
/// Ceiling on matrix powering when a bound is astronomically large.
pub const T_MAX_CAP: usize = 20_000;
/// `exact eigen gap / max-degree corollary` must stay below this for drifted
/// cycles with `d > 2`.
pub const SHARPNESS_RATIO: f64 = 2.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A conditional bound is beaten on a chain where its hypothesis fails.
    HypothesisUnmet,
    /// The bound is infinite, or exceeds what matrix powering covered.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessRow {
    pub chain: String,
    pub check: String,
    pub eps: Option<f64>,
    #[serde(with = "inf_as_null")]
    pub exact: f64,
    #[serde(with = "inf_as_null")]
    pub bound: f64,
    /// Positive when the dominance holds with room to spare.
    #[serde(with = "inf_as_null")]
    pub margin: f64,
    pub verdict: Verdict,
    pub note: Option<String>,
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() { Some(*v) } else { None }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessTable {
    pub rows: Vec<HarnessRow>,
}

impl HarnessTable {
    pub fn failures(&self) -> impl Iterator<Item = &HarnessRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    /// The first failing row, serialized: the witness for a violated
    /// dominance.
    pub fn witness(&self) -> Option<String> {
        self.failures()
            .next()
            .map(|r| serde_json::to_string(r).expect("rows serialize"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rows serialize")
    }

    /// CSV with header `chain,check,eps,exact,bound,margin,verdict,note`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "chain", "check", "eps", "exact", "bound", "margin", "verdict", "note",
        ])?;
        let num = |v: f64| {
            if v.is_finite() {
                v.to_string()
            } else {
                "inf".into()
            }
        };
        for r in &self.rows {
            let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
            w.write_record([
                r.chain.clone(),
                r.check.clone(),
                r.eps.map(|e| e.to_string()).unwrap_or_default(),
                num(r.exact),
                num(r.bound),
                num(r.margin),
                verdict.as_str().unwrap_or_default().to_string(),
                r.note.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessOptions {
    pub eps: Vec<f64>,
    /// Trials for the evolving-set rows on aperiodic chains; 0 skips them.
    pub evoset_trials: usize,
    pub evoset_horizon: usize,
    pub seed: u64,
    /// Self-test: report the first general isoperimetric mixing time as 10% above
    /// its integer bound.
    pub inject_corruption: bool,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            eps: vec![0.25, 0.05, 0.01],
            evoset_trials: 2000,
            evoset_horizon: 200,
            seed: 2024,
            inject_corruption: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{chain}: {source}")]
    Analysis {
        chain: String,
        #[source]
        source: ChainAnalysisError,
    },
    #[error("{chain}: {source}")]
    Exact {
        chain: String,
        #[source]
        source: AnalysisError,
    },
    #[error("{chain}: {source}")]
    Evoset {
        chain: String,
        #[source]
        source: EvosetError,
    },
}

fn distance_for(q: Quantity) -> Option<DistanceKind> {
    match q {
        Quantity::TauTv => Some(DistanceKind::Tv),
        Quantity::TauL2 => Some(DistanceKind::L2),
        Quantity::TauLinf => Some(DistanceKind::Linf),
        Quantity::TauEntropy => Some(DistanceKind::RelativeEntropy),
        Quantity::EigenGap | Quantity::SpectralGap => None,
    }
}

const TIME_QUANTITIES: [Quantity; 4] = [
    Quantity::TauTv,
    Quantity::TauL2,
    Quantity::TauLinf,
    Quantity::TauEntropy,
];

fn check_name(e: &BoundEntry) -> String {
    let s = serde_json::to_value(e.source).expect("source serializes");
    let q = serde_json::to_value(e.quantity).expect("quantity serializes");
    format!(
        "{}:{}",
        s.as_str().unwrap_or_default(),
        q.as_str().unwrap_or_default()
    )
}

/// Upper-bound row: `exact <= bound`, with `exact` possibly unknown past
/// `t_max`. Mixing times are integers, so a real bound `B` certifies
/// `tau <= ceil(B)`.
fn upper_row(
    chain: &str,
    e: &BoundEntry,
    eps: Option<f64>,
    exact: Option<f64>,
    covered: f64,
) -> HarnessRow {
    let limit = if e.quantity.is_mixing_time() {
        e.value.ceil()
    } else {
        e.value
    };
    let (exact_v, verdict, note) = match exact {
        _ if !e.value.is_finite() => (
            exact.unwrap_or(f64::INFINITY),
            Verdict::Inconclusive,
            e.note.clone(),
        ),
        Some(x) if x <= limit => (x, Verdict::Pass, None),
        Some(x) if e.conditional => (x, Verdict::HypothesisUnmet, e.note.clone()),
        Some(x) => (x, Verdict::Fail, None),
        None if limit >= covered => (
            f64::INFINITY,
            Verdict::Inconclusive,
            Some(format!("not mixed within {covered} steps")),
        ),
        None if e.conditional => (f64::INFINITY, Verdict::HypothesisUnmet, e.note.clone()),
        None => (
            f64::INFINITY,
            Verdict::Fail,
            Some(format!("not mixed within {covered} steps")),
        ),
    };
    HarnessRow {
        chain: chain.to_string(),
        check: check_name(e),
        eps,
        exact: exact_v,
        bound: e.value,
        margin: limit - exact_v,
        verdict,
        note,
    }
}

/// Lower-bound row: `bound <= exact` (eigenvalue and spectral gaps, and the
/// modulus lower bound on mixing times).
fn lower_row(
    chain: &str,
    check: String,
    eps: Option<f64>,
    exact: f64,
    bound: f64,
    tol: f64,
) -> HarnessRow {
    HarnessRow {
        chain: chain.to_string(),
        check,
        eps,
        exact,
        bound,
        margin: exact - bound,
        verdict: if bound <= exact + tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        note: None,
    }
}

fn chain_rows(chain: &SuiteChain, opts: &HarnessOptions) -> Result<Vec<HarnessRow>, HarnessError> {
    let name = chain.name.as_str();
    let exact_err = |source| HarnessError::Exact {
        chain: name.to_string(),
        source,
    };
    let a = ChainAnalysis::new(chain).map_err(|source| HarnessError::Analysis {
        chain: name.to_string(),
        source,
    })?;
    let reports: Vec<_> = opts.eps.iter().map(|&eps| a.bound_report(eps)).collect();
    let mut rows = Vec::new();

    // Gaps, eps-independent; taken from the first report.
    if let Some(r) = reports.first() {
        for e in r.entries.iter().filter(|e| !e.informational) {
            let exact = match e.quantity {
                Quantity::EigenGap => a.eigen_gap,
                Quantity::SpectralGap => a.spectral_gap,
                _ => continue,
            };
            let mut row = lower_row(name, check_name(e), None, exact, e.value, GAP_TOL);
            if row.verdict == Verdict::Fail && e.conditional {
                row.verdict = Verdict::HypothesisUnmet;
                row.note = e.note.clone();
            }
            rows.push(row);
        }
    }

    for q in TIME_QUANTITIES {
        let kind = distance_for(q).expect("time quantity");
        let finite_max = reports
            .iter()
            .flat_map(|r| r.applicable(q))
            .map(|e| e.value)
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max);
        let lower_max = if q == Quantity::TauTv {
            opts.eps
                .iter()
                .map(|&e| tv_lower_bound_steps(a.second_modulus, e))
                .filter(|v| v.is_finite())
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        let t_max = ((finite_max.max(lower_max).ceil() as usize) + 1).min(T_MAX_CAP);
        let times = exact_mixing_times(&chain.kernel, kind, &opts.eps, t_max).map_err(exact_err)?;
        for ((&eps, report), time) in opts.eps.iter().zip(&reports).zip(times) {
            let exact = time.steps().map(|t| t as f64);
            for e in report.applicable(q) {
                rows.push(upper_row(name, e, Some(eps), exact, t_max as f64));
            }
            if q == Quantity::TauTv {
                let lower = tv_lower_bound_steps(a.second_modulus, eps);
                let exact = match time {
                    MixingTime::Reached(t) => t as f64,
                    MixingTime::NotReached(_) => f64::INFINITY,
                };
                rows.push(lower_row(
                    name,
                    "modulus_lower_bound:tau_tv".into(),
                    Some(eps),
                    exact,
                    lower,
                    0.0,
                ));
            }
        }
    }

    rows.extend(
        worst_case_rows(chain, &a).map_err(|source| HarnessError::Analysis {
            chain: name.to_string(),
            source: source.into(),
        })?,
    );

    if let WalkFamily::MaxDegree { d, .. } = chain.family {
        if d > 2 && name.starts_with("drifted-cycle") {
            if let Some(e) = reports.first().and_then(|r| {
                r.entries.iter().find(|e| {
                    e.source == BoundSource::EulerianMaxDegreeWalk
                        && e.quantity == Quantity::EigenGap
                })
            }) {
                let ratio = a.eigen_gap / e.value;
                rows.push(HarnessRow {
                    chain: name.to_string(),
                    check: "factor_two_sharpness:eigen_gap".into(),
                    eps: None,
                    exact: ratio,
                    bound: SHARPNESS_RATIO,
                    margin: SHARPNESS_RATIO - ratio,
                    verdict: if ratio <= SHARPNESS_RATIO {
                        Verdict::Pass
                    } else {
                        Verdict::Fail
                    },
                    note: None,
                });
            }
        }
    }

    // The evolving-set argument needs no laziness, only a chain whose
    // distance actually decays.
    if a.second_modulus < 1.0 - GAP_TOL && opts.evoset_trials > 0 {
        rows.extend(evoset_rows(chain, &a, opts)?);
    }
    Ok(rows)
}

/// `C_sin(A)` against the extremal-profile bound, maximized over sets with
/// `pi(A) <= 1/2`.
fn worst_case_rows(chain: &SuiteChain, a: &ChainAnalysis) -> Result<Vec<HarnessRow>, IsoError> {
    let iso = Isoperimetry::new(&chain.kernel)?;
    let delta = a.summary.delta_min;
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    for bits in 1..full_mask(iso.n()) {
        let s = iso.set_from_bits(bits);
        if s.measure() > 0.5 + 1e-12 {
            continue;
        }
        let v = iso.view(&s)?;
        let Some(c) = v.congestion(ConcaveFn::SinPi) else {
            continue;
        };
        let b = worst_case_bound(v.psi(), v.psi_hat(), delta);
        if c - b > worst.0 {
            worst = (c - b, c, b);
        }
    }
    let (_, c, b) = worst;
    Ok(vec![lower_row(
        &chain.name,
        "worst_case_profile:c_sin".into(),
        None,
        b,
        c,
        1e-12,
    )])
}

fn evoset_rows(
    chain: &SuiteChain,
    a: &ChainAnalysis,
    opts: &HarnessOptions,
) -> Result<Vec<HarnessRow>, HarnessError> {
    let name = chain.name.as_str();
    let ev = |source| HarnessError::Evoset {
        chain: name.to_string(),
        source,
    };
    let iso = Isoperimetry::new(&chain.kernel).map_err(|e| ev(e.into()))?;
    let trace = simulate_with(
        &iso,
        chain.kernel.fingerprint(),
        0,
        opts.evoset_horizon,
        opts.evoset_trials,
        opts.seed,
    )
    .map_err(ev)?;
    let curve = mixing_curve_from(&chain.kernel, 0, DistanceKind::Tv, opts.evoset_horizon)
        .map_err(|source| HarnessError::Exact {
            chain: name.to_string(),
            source,
        })?;
    let steps = tv_domination_check(&trace, &curve).map_err(ev)?;
    let worst = steps
        .iter()
        .max_by(|x, y| (x.excess - x.margin).total_cmp(&(y.excess - y.margin)))
        .copied();
    let mut rows = Vec::new();
    if let Some(w) = worst {
        rows.push(HarnessRow {
            chain: name.to_string(),
            check: "evolving_set:tv_domination".into(),
            eps: None,
            exact: w.excess,
            bound: w.margin,
            margin: w.margin - w.excess,
            verdict: if steps.iter().all(|s| s.passed) {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            note: Some(format!("worst step t={}", w.t)),
        });
    }
    let exact = exact_step_check(&iso, &trace, ConcaveFn::SinPi, a.c_sin).map_err(ev)?;
    rows.push(HarnessRow {
        chain: name.to_string(),
        check: "evolving_set:exact_contraction".into(),
        eps: None,
        exact: exact.max_contraction_excess,
        bound: crate::evoset::EXACT_TOL,
        margin: crate::evoset::EXACT_TOL - exact.max_contraction_excess,
        verdict: if exact.passed {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        note: Some(format!("{} sets", exact.sets_checked)),
    });
    Ok(rows)
}

/// Exact analysis against every bound on every chain, one row per
/// comparison.
pub fn dominance_harness(
    suite: &[SuiteChain],
    opts: &HarnessOptions,
) -> Result<HarnessTable, HarnessError> {
    let per_chain: Vec<Vec<HarnessRow>> = suite
        .par_iter()
        .map(|c| chain_rows(c, opts))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<HarnessRow> = per_chain.into_iter().flatten().collect();
    if opts.inject_corruption {
        if let Some(r) = rows.iter_mut().find(|r| {
            r.eps.is_some() && r.bound.is_finite() && r.check.starts_with("isoperimetric_general")
        }) {
            r.exact = r.bound.ceil().max(1.0) * 1.1;
            r.margin = r.bound - r.exact;
            r.verdict = if r.margin >= 0.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            r.note = Some("injected corruption".into());
        }
    }
    Ok(HarnessTable { rows })
}
