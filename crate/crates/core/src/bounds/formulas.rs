use std::f64::consts::{E, PI};

use super::{BoundEntry, BoundError, BoundSource, Quantity};
use crate::iso::{ConcaveFn, IsoperimetricSummary};
use crate::scalar::Real;

/// Isoperimetric quantities of one chain, in `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoInputs {
    /// Over `pi(A) <= 1/2`.
    pub psi_min: f64,
    pub psi_hat_min: f64,
    pub delta_min: f64,
    pub q_min: f64,
    pub pi_star: f64,
    pub a_hat_min: f64,
    pub a_hat_max: f64,
    pub a_max: f64,
}

impl IsoInputs {
    pub fn from_summary<T: Real>(s: &IsoperimetricSummary<T>) -> Self {
        Self {
            psi_min: s.psi_min.as_f64(),
            psi_hat_min: s.psi_hat_min.as_f64(),
            delta_min: s.delta_min.as_f64(),
            q_min: s.q_min.as_f64(),
            pi_star: s.pi_star.as_f64(),
            a_hat_min: s.a_hat_min.as_f64(),
            a_hat_max: s.a_hat_max.as_f64(),
            a_max: s.a_max.as_f64(),
        }
    }
}

/// `log_term / (-log rate)`: the first real `t` with `e^{log_term} rate^t <= 1`.
/// `+inf` when `rate` is outside `(0, 1)` (the printed formula is undefined
/// or vacuous there), `0` when the log term is already nonpositive.
fn geometric_steps(log_term: f64, rate: f64) -> f64 {
    if log_term <= 0.0 {
        0.0
    } else if rate > 0.0 && rate < 1.0 {
        log_term / -rate.ln()
    } else {
        f64::INFINITY
    }
}

fn vacuous_note(e: BoundEntry) -> BoundEntry {
    if e.value.is_finite() {
        e
    } else {
        e.note("vacuous: contraction rate outside (0, 1)")
    }
}

/// Geometric decay `TV(t) <= M1 M2 c^t` at congestion rate `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionBound {
    pub c: f64,
    /// `max a(1-a)/f(a)` over achievable set measures `a <= 1/2`.
    pub m1: f64,
    /// `max_x f(pi(x)^#)/pi(x)`.
    pub m2: f64,
}

impl ContractionBound {
    pub fn prefactor(&self) -> f64 {
        self.m1 * self.m2
    }

    pub fn tv_at(&self, t: u32) -> f64 {
        self.prefactor() * self.c.powi(t as i32)
    }

    /// Real `t` after which the TV bound is at most `eps`.
    pub fn tv_steps(&self, eps: f64) -> f64 {
        let log_term = (self.prefactor() / eps).ln();
        if log_term <= 0.0 {
            0.0
        } else if self.c == 0.0 {
            1.0
        } else {
            geometric_steps(log_term, self.c)
        }
    }

    pub fn eigen_gap(&self) -> f64 {
        1.0 - self.c
    }

    pub fn entries(&self, f: ConcaveFn, eps: f64) -> Vec<BoundEntry> {
        let tag = |e: BoundEntry| {
            e.input("c_f", self.c)
                .input("m1", self.m1)
                .input("m2", self.m2)
                .note(f.name())
        };
        vec![
            tag(BoundEntry::new(
                BoundSource::CongestionContraction,
                Quantity::TauTv,
                self.tv_steps(eps),
            )),
            tag(BoundEntry::new(
                BoundSource::CongestionContraction,
                Quantity::EigenGap,
                self.eigen_gap(),
            )),
        ]
    }
}

/// Geometric-decay bound from a measured congestion `c` for `f`.
/// `measures` are the achievable set measures (any order).
pub fn congestion_contraction(
    c: f64,
    f: ConcaveFn,
    pi: &[f64],
    measures: &[f64],
) -> Result<ContractionBound, BoundError> {
    if c.is_nan() || c < 0.0 {
        return Err(BoundError::InvalidInput(format!(
            "congestion {c} is negative"
        )));
    }
    if c >= 1.0 {
        return Err(BoundError::ContractionNotStrict(c));
    }
    let m1 = measures
        .iter()
        .filter(|&&a| a > 0.0 && a <= 0.5 + 1e-12)
        .map(|&a| a * (1.0 - a) / f.eval(a))
        .fold(f64::NEG_INFINITY, f64::max);
    let m2 = pi
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| f.eval(p.min(1.0 - p)) / p)
        .fold(f64::NEG_INFINITY, f64::max);
    if !m1.is_finite() || !m2.is_finite() || m1 <= 0.0 {
        return Err(BoundError::InvalidInput(
            "f vanishes on an achievable measure".into(),
        ));
    }
    Ok(ContractionBound { c, m1, m2 })
}

/// Integer lower bound on TV mixing from `TV(t) >= |lambda|^t / 2`, where
/// `modulus` is the largest nontrivial eigenvalue modulus.
pub fn tv_lower_bound_steps(modulus: f64, eps: f64) -> f64 {
    let log_term = (0.5 / eps).ln();
    if log_term <= 0.0 || modulus <= 0.0 {
        0.0
    } else if modulus >= 1.0 {
        f64::INFINITY
    } else {
        (log_term / -modulus.ln()).ceil()
    }
}

/// Entropy, L2 and L-infinity mixing bounds at the sin-congestion rate.
pub fn congestion_distance_bounds(c_sin: f64, pi_star: f64, eps: f64) -> Vec<BoundEntry> {
    let rate = if c_sin < 1.0 {
        1.0 / (1.0 - c_sin)
    } else {
        f64::INFINITY
    };
    let odds = ((1.0 - pi_star) / pi_star).ln();
    let inv = (1.0 / eps).ln();
    let clamp = |x: f64| if x.is_finite() { x.max(0.0) } else { x };
    let entry = |q, v: f64| {
        vacuous_note(
            BoundEntry::new(BoundSource::CongestionContraction, q, clamp(v))
                .input("c_sin", c_sin)
                .input("pi_star", pi_star),
        )
    };
    vec![
        entry(
            Quantity::TauEntropy,
            rate * ((1.0 / pi_star).ln().ln() + inv),
        ),
        entry(Quantity::TauL2, rate * (0.5 * odds + inv)),
        entry(Quantity::TauLinf, rate * (odds + inv)),
    ]
}

/// Bounds from the capped expansion `Psi_hat`, the subset-measure gap and
/// the minimum cut.
pub fn isoperimetric_general(s: &IsoInputs, eps: f64) -> Vec<BoundEntry> {
    let eigen = if s.delta_min > 0.0 {
        2.0 * (s.a_hat_min / s.delta_min) * (1.0 - (2.0 * PI * s.a_hat_max).cos())
    } else {
        0.0
    };
    let log_term = ((1.0 - s.pi_star) / eps).ln();
    let tau = geometric_steps(log_term, 1.0 - eigen);
    let spectral = 2.0 * s.q_min / s.pi_star * (1.0 - (PI * s.pi_star).cos());
    let approx_rate = 2.0 * PI * PI * s.psi_hat_min * s.a_hat_max;
    let tag = |e: BoundEntry| {
        e.input("a_hat_min", s.a_hat_min)
            .input("a_hat_max", s.a_hat_max)
            .input("delta_min", s.delta_min)
            .input("pi_star", s.pi_star)
    };
    let src = BoundSource::IsoperimetricGeneral;
    vec![
        vacuous_note(tag(BoundEntry::new(src, Quantity::TauTv, tau))),
        tag(BoundEntry::new(src, Quantity::EigenGap, eigen)),
        BoundEntry::new(src, Quantity::SpectralGap, spectral)
            .input("q_min", s.q_min)
            .input("pi_star", s.pi_star),
        BoundEntry::new(src, Quantity::TauTv, log_term.max(0.0) / approx_rate)
            .input("psi_hat_min", s.psi_hat_min)
            .input("a_hat_max", s.a_hat_max)
            .informational(),
        BoundEntry::new(src, Quantity::EigenGap, approx_rate)
            .input("psi_hat_min", s.psi_hat_min)
            .input("a_hat_max", s.a_hat_max)
            .informational(),
        BoundEntry::new(src, Quantity::SpectralGap, PI * PI * s.pi_star * s.q_min)
            .input("q_min", s.q_min)
            .input("pi_star", s.pi_star)
            .informational(),
    ]
}

/// Simple random walk on an expanding Eulerian graph with `m` edges.
/// `lazy` halves the spectral bound and replaces `m` by `2m` elsewhere.
pub fn eulerian_simple(m: u64, eps: f64, lazy: bool) -> Vec<BoundEntry> {
    let m0 = m as f64;
    let m = if lazy { 2.0 * m0 } else { m0 };
    let cos = (2.0 * PI / m).cos();
    let spectral = (1.0 - (2.0 * PI / m0).cos()) * if lazy { 0.5 } else { 1.0 };
    let eigen = 1.0 - cos;
    let tau = geometric_steps(((1.0 - 2.0 / m) / eps).ln(), cos);
    let inv = (1.0 / eps).ln();
    let linf = if eps <= 1.0 {
        let spectral_form = geometric_steps(((m - 2.0) / 2.0).ln() + inv, cos);
        spectral_form.min(m * m / 6.0 + m * m / 8.0 * inv)
    } else {
        m * m * (1.0 + 3.0 * eps) / (3.0 * (1.0 + eps).powi(3))
    };
    let a = 1.0 / (2.0 * PI * PI);
    let src = BoundSource::EulerianSimpleWalk;
    let tag = |e: BoundEntry| e.input("m", m0).input("lazy", f64::from(u8::from(lazy)));
    vec![
        tag(BoundEntry::new(src, Quantity::SpectralGap, spectral)),
        tag(BoundEntry::new(src, Quantity::EigenGap, eigen)),
        vacuous_note(tag(BoundEntry::new(src, Quantity::TauTv, tau))),
        vacuous_note(tag(BoundEntry::new(src, Quantity::TauLinf, linf.max(0.0)))),
        tag(BoundEntry::new(
            src,
            Quantity::TauTv,
            a * m * m * ((1.0 - 2.0 / m) / eps).ln().max(0.0),
        ))
        .informational(),
        tag(BoundEntry::new(
            src,
            Quantity::EigenGap,
            2.0 * PI * PI / (m * m),
        ))
        .informational(),
    ]
}

/// Max-degree walk on an expanding Eulerian graph with `n` vertices and
/// maximum out-degree `d`. `lazy` halves the spectral bound and replaces `d`
/// by `2d` elsewhere.
pub fn eulerian_max_degree(n: u64, d: u64, eps: f64, lazy: bool) -> Vec<BoundEntry> {
    let n = n as f64;
    let d0 = d as f64;
    let d = if lazy { 2.0 * d0 } else { d0 };
    let base = 1.0 - (PI / n).cos();
    let spectral = 2.0 / d0 * base * if lazy { 0.5 } else { 1.0 };
    let eigen = 2.0 / d * base;
    let tau = geometric_steps(((1.0 - 1.0 / n) / eps).ln(), 1.0 - eigen);
    let inv = (1.0 / eps).ln();
    let linf = if eps <= 1.0 {
        let spectral_form = geometric_steps((n - 1.0).ln() + inv, 1.0 - eigen);
        spectral_form.min(n * n * d / 3.0 + n * n * d / 4.0 * inv)
    } else {
        n * n * d * (2.0 / 3.0) * (1.0 + 3.0 * eps) / (1.0 + eps).powi(3)
    };
    let src = BoundSource::EulerianMaxDegreeWalk;
    let tag = |e: BoundEntry| {
        e.input("n", n)
            .input("d", d0)
            .input("lazy", f64::from(u8::from(lazy)))
    };
    vec![
        tag(BoundEntry::new(src, Quantity::SpectralGap, spectral)),
        tag(BoundEntry::new(src, Quantity::EigenGap, eigen)),
        vacuous_note(tag(BoundEntry::new(src, Quantity::TauTv, tau))),
        vacuous_note(tag(BoundEntry::new(src, Quantity::TauLinf, linf.max(0.0)))),
        tag(BoundEntry::new(
            src,
            Quantity::TauTv,
            n * n * d / (PI * PI) * ((1.0 - 1.0 / n) / eps).ln().max(0.0),
        ))
        .informational(),
        tag(BoundEntry::new(
            src,
            Quantity::EigenGap,
            PI * PI / (d * n * n),
        ))
        .informational(),
    ]
}

/// Which reading of the `1 - C_f(r)` lower bounds to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapForm {
    /// The `Delta * Psi` forms exactly as displayed. For `a(1-a)` the
    /// displayed flat term `8 Delta Psi` carries no indicator and is
    /// refuted by exact spectra; see [`GapForm::Reduced`].
    Printed,
    /// The `Delta * Psi` forms obtained by substituting `Psi = Delta/2` into
    /// the `Psi^2` forms and rescaling by `2 Psi / Delta`. Differs from
    /// `Printed` only for `a(1-a)`, where the flat term holds for `r > 1/2`.
    Reduced,
    /// Pure `Psi^2` forms.
    PsiSquared,
}

/// Lower bound on `1 - C_f(r)`; `None` for `sin(pi a)`, which has no such
/// display.
pub fn congestion_gap_bound(
    f: ConcaveFn,
    form: GapForm,
    delta: f64,
    psi: f64,
    r: f64,
) -> Option<f64> {
    let half = r <= 0.5;
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let dp = delta * psi;
    let p2 = psi * psi;
    Some(match (f, form) {
        (ConcaveFn::SinPi, _) => return None,
        (ConcaveFn::AOneMinusA, GapForm::Printed) => {
            2.0 * dp / (r * (1.0 - r)) * ind(half) + 8.0 * dp
        }
        (ConcaveFn::AOneMinusA, GapForm::Reduced) => {
            2.0 * dp / (r * (1.0 - r)) * ind(half) + 8.0 * dp * ind(!half)
        }
        (ConcaveFn::AOneMinusA, GapForm::PsiSquared) => {
            4.0 * p2 / (r * (1.0 - r)) * ind(half) + 16.0 * p2 * ind(!half)
        }
        (ConcaveFn::ALogInvA, GapForm::Printed | GapForm::Reduced) => {
            let low = r <= (-0.5f64).exp();
            let head = if low {
                dp / (2.0 * r * r * (1.0 / r).ln())
            } else {
                0.0
            };
            head + E * dp
        }
        (ConcaveFn::ALogInvA, GapForm::PsiSquared) => {
            let low = r <= (-0.5f64).exp();
            if low {
                2.0 * p2 / (r * r * (1.0 / r).ln())
            } else {
                4.0 * E * p2
            }
        }
        (ConcaveFn::SqrtAOneMinusA, GapForm::Printed | GapForm::Reduced) => {
            let s = r * (1.0 - r);
            dp / (4.0 * s * s) * ind(half) + 4.0 * dp * ind(!half)
        }
        (ConcaveFn::SqrtAOneMinusA, GapForm::PsiSquared) => {
            let s = r * (1.0 - r);
            p2 / (2.0 * s * s) * ind(half) + 8.0 * p2 * ind(!half)
        }
    })
}

/// `r -> ` best valid lower bound on `1 - C_f(r)`: the larger of the
/// reduced `Delta * Psi` form and the `Psi^2` form. `psi` is the minimum of
/// `Psi(A)` over every proper `A`.
pub fn congestion_gap_profile(delta: f64, psi: f64, f: ConcaveFn) -> impl Fn(f64) -> f64 {
    move |r| {
        let a = congestion_gap_bound(f, GapForm::Reduced, delta, psi, r).unwrap_or(0.0);
        let b = congestion_gap_bound(f, GapForm::PsiSquared, delta, psi, r).unwrap_or(0.0);
        a.max(b)
    }
}

/// Closed forms in `Psi_min * A_max`, where `psi_min` ranges over every
/// proper set and `a_max = max(psi_min, Delta_min / 2)`. Mixing times carry
/// the displayed ceilings.
pub fn psi_delta_bounds(psi_min: f64, a_max: f64, pi_star: f64, eps: f64) -> Vec<BoundEntry> {
    let pa = psi_min * a_max;
    let p2 = pi_star * pi_star;
    let tau = if eps <= 0.5 {
        ((1.0 - 4.0 * p2) / 2.0 + (1.0 / (2.0 * eps)).ln()) / (16.0 * pa)
    } else {
        ((1.0 - eps).powi(2) - p2) / (8.0 * pa)
    };
    let tau_d = if eps <= 0.5 {
        (1.0 - E * p2 + (1.0 / (2.0 * eps)).ln()) / (4.0 * E * pa)
    } else {
        ((-2.0 * eps).exp() - p2) / (4.0 * pa)
    };
    let e2 = eps * eps;
    let tau_2 = if eps <= 1.0 {
        (2.0 / 3.0 + (1.0 / eps).ln()) / (8.0 * pa)
    } else {
        (1.0 + 3.0 * e2) / (6.0 * pa * (1.0 + e2).powi(3))
    };
    let steps = |x: f64| {
        if x.is_finite() {
            x.ceil().max(0.0)
        } else {
            f64::INFINITY
        }
    };
    let src = BoundSource::PsiDeltaProduct;
    let tag = |e: BoundEntry| {
        e.input("psi_min", psi_min)
            .input("a_max", a_max)
            .input("pi_star", pi_star)
    };
    vec![
        tag(BoundEntry::new(src, Quantity::EigenGap, 16.0 * pa)),
        tag(BoundEntry::new(src, Quantity::TauTv, steps(tau))),
        tag(BoundEntry::new(src, Quantity::TauEntropy, steps(tau_d))),
        tag(BoundEntry::new(src, Quantity::TauL2, steps(tau_2))),
    ]
}

/// `tau_inf(eps) <= tau_2,P(sqrt eps) + tau_2,P*(sqrt eps)`; the arguments
/// are the two L2 bounds already evaluated at `sqrt(eps)`.
pub fn linf_composition_bound(tau2_forward: f64, tau2_reversed: f64) -> f64 {
    tau2_forward + tau2_reversed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(entries: &[BoundEntry], q: Quantity, informational: bool) -> f64 {
        entries
            .iter()
            .find(|e| e.quantity == q && e.informational == informational)
            .unwrap()
            .value
    }

    #[test]
    fn geometric_steps_edges() {
        assert_eq!(geometric_steps(-1.0, 0.5), 0.0);
        assert_eq!(geometric_steps(1.0, 1.0), f64::INFINITY);
        assert_eq!(geometric_steps(1.0, 0.0), f64::INFINITY);
        assert!((geometric_steps(2f64.ln(), 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_steps() {
        assert_eq!(tv_lower_bound_steps(0.5, 0.125), 2.0);
        assert_eq!(tv_lower_bound_steps(0.5, 0.6), 0.0);
        assert_eq!(tv_lower_bound_steps(1.0, 0.1), f64::INFINITY);
        assert_eq!(tv_lower_bound_steps(0.0, 0.1), 0.0);
    }

    #[test]
    fn simple_walk_on_triangle_both_ways() {
        let e = eulerian_simple(6, 0.25, false);
        assert!((value(&e, Quantity::EigenGap, false) - 0.5).abs() < 1e-15);
        assert!((value(&e, Quantity::SpectralGap, false) - 0.5).abs() < 1e-15);
        // log((2/3)/0.25) / log 2
        let tau = (8.0f64 / 3.0).ln() / 2f64.ln();
        assert!((value(&e, Quantity::TauTv, false) - tau).abs() < 1e-14);
    }

    #[test]
    fn too_few_edges_is_vacuous_not_an_error() {
        let e = eulerian_simple(3, 0.1, false);
        assert_eq!(value(&e, Quantity::TauTv, false), f64::INFINITY);
        assert!(value(&e, Quantity::TauLinf, false).is_finite());
    }

    #[test]
    fn max_degree_equality_instance() {
        let e = eulerian_max_degree(3, 2, 0.1, false);
        assert!((value(&e, Quantity::EigenGap, false) - 0.5).abs() < 1e-15);
        let lazy = eulerian_max_degree(3, 2, 0.1, true);
        assert!((value(&lazy, Quantity::EigenGap, false) - 0.25).abs() < 1e-15);
        assert!((value(&lazy, Quantity::SpectralGap, false) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn reduced_and_printed_differ_only_for_a_one_minus_a() {
        for r in [0.1, 0.4, 0.5, 0.7, 0.95] {
            for f in [ConcaveFn::ALogInvA, ConcaveFn::SqrtAOneMinusA] {
                assert_eq!(
                    congestion_gap_bound(f, GapForm::Printed, 0.2, 0.05, r),
                    congestion_gap_bound(f, GapForm::Reduced, 0.2, 0.05, r)
                );
            }
        }
        let f = ConcaveFn::AOneMinusA;
        assert_eq!(
            congestion_gap_bound(f, GapForm::Printed, 0.2, 0.05, 0.7),
            congestion_gap_bound(f, GapForm::Reduced, 0.2, 0.05, 0.7)
        );
        assert!(
            congestion_gap_bound(f, GapForm::Printed, 0.2, 0.05, 0.3)
                > congestion_gap_bound(f, GapForm::Reduced, 0.2, 0.05, 0.3)
        );
        assert_eq!(
            congestion_gap_bound(ConcaveFn::SinPi, GapForm::Printed, 0.2, 0.05, 0.3),
            None
        );
    }
}
