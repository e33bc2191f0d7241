use serde::{Deserialize, Serialize};

use super::{BoundEntry, BoundError, BoundSource, Quantity};
use crate::iso::CongestionProfile;

const CONVEXITY_GRID: usize = 1000;
const SIMPSON_TOL: f64 = 1e-10;

/// Which distance an evolving-set integral bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceIntegral {
    /// Total variation, paired with `C_{a(1-a)}`.
    Tv,
    /// Relative entropy, paired with `C_{a log(1/a)}`.
    Entropy,
    /// L2, paired with `C_{sqrt(a(1-a))}`.
    L2,
}

impl DistanceIntegral {
    pub fn quantity(self) -> Quantity {
        match self {
            Self::Tv => Quantity::TauTv,
            Self::Entropy => Quantity::TauEntropy,
            Self::L2 => Quantity::TauL2,
        }
    }

    fn upper(self, eps: f64) -> f64 {
        match self {
            Self::Tv => 1.0 - eps,
            Self::Entropy => (-eps).exp(),
            Self::L2 => 1.0 / (1.0 + eps * eps),
        }
    }

    /// The integrand without the `1 / (1 - C(r))` factor.
    fn weight(self, r: f64) -> f64 {
        match self {
            Self::Tv => 1.0 / (1.0 - r),
            Self::Entropy => 1.0 / (r * -r.ln()),
            Self::L2 => 1.0 / (2.0 * r * (1.0 - r)),
        }
    }

    /// Antiderivative of `weight`.
    fn antiderivative(self, r: f64) -> f64 {
        match self {
            Self::Tv => -(-r).ln_1p(),
            Self::Entropy => -(-r.ln()).ln(),
            Self::L2 => 0.5 * (r / (1.0 - r)).ln(),
        }
    }

    /// Map from the convexity variable `s` to the profile argument, and the
    /// range of `s` covering the integration range.
    fn convexity_map(self, s: f64) -> f64 {
        match self {
            Self::Tv => 1.0 - s,
            Self::Entropy => (-s).exp(),
            Self::L2 => 1.0 / (1.0 + s * s),
        }
    }

    fn convexity_range(self, pi_star: f64, eps: f64) -> (f64, f64) {
        let hi = match self {
            Self::Tv => 1.0 - pi_star,
            Self::Entropy => -pi_star.ln(),
            Self::L2 => ((1.0 - pi_star) / pi_star).sqrt(),
        };
        (eps, hi)
    }
}

/// The congestion input to an integral bound.
#[derive(Clone, Copy)]
pub enum CongestionCurve<'a> {
    /// Measured step profile `r -> C_f(r)`.
    Step(&'a CongestionProfile<f64>),
    /// Closed-form lower bound `r -> g(r) <= 1 - C_f(r)`.
    Gap(&'a dyn Fn(f64) -> f64),
}

impl CongestionCurve<'_> {
    /// `1 - C(r)` with step profiles linearly interpolated between their
    /// breakpoints; used only for the convexity check.
    fn smooth_gap_at(&self, r: f64) -> f64 {
        match self {
            Self::Step(p) => {
                let pts = &p.points;
                let i = pts.partition_point(|&(x, _)| x <= r);
                let c = if i == 0 {
                    pts[0].1
                } else if i == pts.len() {
                    pts[i - 1].1
                } else {
                    let ((x0, c0), (x1, c1)) = (pts[i - 1], pts[i]);
                    c0 + (c1 - c0) * (r - x0) / (x1 - x0)
                };
                1.0 - c
            }
            Self::Gap(g) => g(r),
        }
    }
}

fn step_value(p: &CongestionProfile<f64>, r: f64) -> f64 {
    p.at(r)
        .unwrap_or_else(|| p.points.first().map_or(0.0, |q| q.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralBound {
    pub kind: DistanceIntegral,
    /// The integral before the ceiling.
    pub integral: f64,
    /// The ceiling of the integral.
    pub steps: f64,
    /// The convexity side condition held on the check grid.
    pub convex: bool,
    pub empty_range: bool,
}

impl IntegralBound {
    pub fn entry(&self, pi_star: f64, eps: f64) -> BoundEntry {
        let e = BoundEntry::new(
            BoundSource::EvolvingSetIntegral,
            self.kind.quantity(),
            self.steps,
        )
        .input("pi_star", pi_star)
        .input("eps", eps)
        .input("integral", self.integral);
        if self.empty_range {
            e.note("empty integration range")
        } else if !self.convex {
            e.conditional("convexity side condition failed on the interpolated profile")
        } else {
            e
        }
    }
}

/// `ceil(int_{pi_*}^{upper(eps)} weight(r) / (1 - C(r)) dr)` with the
/// matching convexity side condition checked on a grid.
pub fn evoset_integral_bound(
    curve: CongestionCurve<'_>,
    pi_star: f64,
    eps: f64,
    kind: DistanceIntegral,
) -> Result<IntegralBound, BoundError> {
    if !(pi_star > 0.0 && pi_star < 1.0 && eps > 0.0) {
        return Err(BoundError::InvalidInput(format!(
            "pi_* = {pi_star}, eps = {eps}"
        )));
    }
    if let CongestionCurve::Step(p) = curve {
        if p.points.is_empty() {
            return Err(BoundError::InvalidInput("empty congestion profile".into()));
        }
    }
    let (lo, hi) = (pi_star, kind.upper(eps));
    if hi <= lo {
        return Ok(IntegralBound {
            kind,
            integral: 0.0,
            steps: 0.0,
            convex: true,
            empty_range: true,
        });
    }
    let integral = match curve {
        CongestionCurve::Step(p) => step_integral(p, kind, lo, hi)?,
        CongestionCurve::Gap(g) => gap_integral(g, kind, lo, hi)?,
    };
    Ok(IntegralBound {
        kind,
        integral,
        steps: integral.ceil(),
        convex: convexity_holds(&curve, kind, pi_star, eps),
        empty_range: false,
    })
}

fn step_integral(
    p: &CongestionProfile<f64>,
    kind: DistanceIntegral,
    lo: f64,
    hi: f64,
) -> Result<f64, BoundError> {
    let mut cuts = vec![lo];
    cuts.extend(p.points.iter().map(|q| q.0).filter(|&r| r > lo && r < hi));
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let gap = 1.0 - step_value(p, w[0]);
        if gap <= 0.0 {
            return Err(BoundError::ProfileTouchesOne(w[0]));
        }
        total += (kind.antiderivative(w[1]) - kind.antiderivative(w[0])) / gap;
    }
    Ok(total)
}

fn gap_integral(
    g: &dyn Fn(f64) -> f64,
    kind: DistanceIntegral,
    lo: f64,
    hi: f64,
) -> Result<f64, BoundError> {
    let mut cuts = vec![lo];
    cuts.extend(
        [0.5, (-0.5f64).exp()]
            .into_iter()
            .filter(|&r| r > lo && r < hi),
    );
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        // The closed forms switch branch at the cut points; integrate each
        // piece over its open interior.
        let (a, b) = (w[0], w[1]);
        let integrand = |r: f64| -> Result<f64, BoundError> {
            let gap = g(r);
            if gap <= 0.0 {
                return Err(BoundError::ProfileTouchesOne(r));
            }
            Ok(kind.weight(r) / gap)
        };
        let inset = (b - a) * 1e-13;
        total += adaptive_simpson(&integrand, a + inset, b - inset)?;
    }
    Ok(total)
}

fn adaptive_simpson<F>(f: &F, a: f64, b: f64) -> Result<f64, BoundError>
where
    F: Fn(f64) -> Result<f64, BoundError>,
{
    fn rec<F: Fn(f64) -> Result<f64, BoundError>>(
        f: &F,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, BoundError> {
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return Ok(left + right + diff / 15.0);
        }
        Ok(
            rec(f, (a, fa), (lm, flm), (m, fm), left, tol / 2.0, depth - 1)?
                + rec(f, (m, fm), (rm, frm), (b, fb), right, tol / 2.0, depth - 1)?,
        )
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = SIMPSON_TOL * whole.abs().max(f64::MIN_POSITIVE);
    rec(f, (a, fa), (m, fm), (b, fb), whole, tol, 48)
}

fn convexity_holds(
    curve: &CongestionCurve<'_>,
    kind: DistanceIntegral,
    pi_star: f64,
    eps: f64,
) -> bool {
    let (lo, hi) = kind.convexity_range(pi_star, eps);
    if hi <= lo {
        return true;
    }
    let h = (hi - lo) / (CONVEXITY_GRID - 1) as f64;
    let phi: Vec<f64> = (0..CONVEXITY_GRID)
        .map(|i| {
            let s = lo + h * i as f64;
            s * curve.smooth_gap_at(kind.convexity_map(s))
        })
        .collect();
    let scale = phi.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    phi.windows(3)
        .all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-9 * scale)
}
