use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::BoundError;
use crate::iso::ConcaveFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileCase {
    /// `Psi(A) < Delta_min / 2`: three plateaus a full gap above and below
    /// `pi(A)`.
    BelowGap,
    /// `Psi(A) >= Delta_min / 2`: two plateaus meeting at the crossing point.
    AboveGap,
}

/// Step function `m(u)` on `[0, 1]`, nonincreasing, with `int m = pi(A)`:
/// the extremal level-set profile for a set with given measure, expansion
/// and subset-measure gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseProfile {
    pub case: ProfileCase,
    pub crossing: Option<f64>,
    /// `(width, value)` from `u = 0` upward; widths sum to 1.
    pub plateaus: Vec<(f64, f64)>,
    pub source_measure: f64,
}

impl WorstCaseProfile {
    pub fn value_at(&self, u: f64) -> f64 {
        let mut start = 0.0;
        for &(w, v) in &self.plateaus {
            if u < start + w {
                return v;
            }
            start += w;
        }
        self.plateaus.last().map_or(self.source_measure, |p| p.1)
    }

    pub fn integral(&self) -> f64 {
        self.plateaus.iter().map(|(w, v)| w * v).sum()
    }

    pub fn integrate(&self, f: ConcaveFn) -> f64 {
        self.plateaus.iter().map(|&(w, v)| w * f.eval(v)).sum()
    }

    /// `int sin(pi m(u)) du / sin(pi pi(A))`.
    pub fn sin_ratio(&self) -> f64 {
        self.integrate(ConcaveFn::SinPi) / ConcaveFn::SinPi.eval(self.source_measure)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.plateaus.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Extremal `m(u)` for a set of measure `pi_a` with expansion `psi`, capped
/// expansion `psi_hat` and subset-measure gap `delta`. The `crossing` point
/// (in `(0, 1/2]`) is required, and used, only when `psi >= delta / 2`.
pub fn worst_case_profile(
    pi_a: f64,
    psi: f64,
    psi_hat: f64,
    delta: f64,
    crossing: Option<f64>,
) -> Result<WorstCaseProfile, BoundError> {
    let bad = |msg: String| Err(BoundError::InvalidProfileParameters(msg));
    const TOL: f64 = 1e-12;
    if !(pi_a > 0.0 && pi_a <= 0.5 + TOL) {
        return bad(format!("pi(A) = {pi_a} outside (0, 1/2]"));
    }
    if !(delta > 0.0 && psi >= 0.0 && psi_hat >= 0.0) {
        return bad(format!(
            "need delta > 0 and psi, psi_hat >= 0 (got {delta}, {psi}, {psi_hat})"
        ));
    }
    let mut plateaus = Vec::with_capacity(3);
    let (case, crossing) = if psi < delta / 2.0 {
        if pi_a - delta < -TOL || pi_a + delta > 1.0 + TOL {
            return bad(format!(
                "pi(A) = {pi_a} within delta = {delta} of an endpoint"
            ));
        }
        let w = psi / delta;
        plateaus.extend([(w, pi_a + delta), (1.0 - 2.0 * w, pi_a), (w, pi_a - delta)]);
        (ProfileCase::BelowGap, None)
    } else {
        let Some(p) = crossing else {
            return bad("crossing point required when psi >= delta / 2".into());
        };
        if !(p > 0.0 && p <= 0.5) {
            return bad(format!("crossing {p} outside (0, 1/2]"));
        }
        let (hi, lo) = (pi_a + psi_hat / p, pi_a - psi_hat / (1.0 - p));
        if hi > 1.0 + TOL || lo < -TOL {
            return bad(format!("plateaus {hi}, {lo} leave [0, 1]"));
        }
        plateaus.extend([(p, hi.min(1.0)), (1.0 - p, lo.max(0.0))]);
        (ProfileCase::AboveGap, Some(p))
    };
    plateaus.retain(|&(w, _)| w > 0.0);
    Ok(WorstCaseProfile {
        case,
        crossing,
        plateaus,
        source_measure: pi_a,
    })
}

/// Upper bound on `C_sin(A)` from the extremal profiles:
/// `1 - 2 (Psi/Delta)(1 - cos(pi Delta))` below the gap, `cos(2 pi Psi_hat)`
/// above it.
pub fn worst_case_bound(psi: f64, psi_hat: f64, delta: f64) -> f64 {
    if psi < delta / 2.0 {
        1.0 - 2.0 * (psi / delta) * (1.0 - (PI * delta).cos())
    } else {
        (2.0 * PI * psi_hat).cos()
    }
}
