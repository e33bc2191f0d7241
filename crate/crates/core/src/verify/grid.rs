use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Grid checks pass when no feasible point exceeds its bound by more.
pub const GRID_TOL: f64 = 1e-9;
/// Tolerance for the closed-form boundary identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Slack on the feasibility constraints, so boundary equality curves are
/// neither dropped nor pushed outside the domain by rounding.
const FEASIBLE_SLACK: f64 = 1e-12;

/// One inequality evaluated over a grid: `max (lhs - rhs)` over the
/// feasible points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub name: String,
    pub resolution: usize,
    pub feasible_points: u64,
    /// Positive means the inequality fails somewhere.
    pub max_violation: f64,
    pub argmax: Vec<f64>,
    pub tolerance: f64,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub grids: Vec<GridReport>,
    /// Largest deviation from the closed-form boundary identities.
    pub boundary_max_error: f64,
    pub boundary_tolerance: f64,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.grids.iter().all(GridReport::passed)
            && self.boundary_max_error <= self.boundary_tolerance
    }
}

#[derive(Clone, Copy)]
struct Worst {
    violation: f64,
    point: [f64; 3],
    count: u64,
}

impl Worst {
    fn empty() -> Self {
        Self {
            violation: f64::NEG_INFINITY,
            point: [f64::NAN; 3],
            count: 0,
        }
    }

    fn add(mut self, violation: f64, point: [f64; 3]) -> Self {
        self.count += 1;
        if violation > self.violation {
            self.violation = violation;
            self.point = point;
        }
        self
    }

    fn merge(a: Self, b: Self) -> Self {
        let mut best = if b.violation > a.violation { b } else { a };
        best.count = a.count + b.count;
        best
    }

    fn report(self, name: &str, resolution: usize, dims: usize) -> GridReport {
        GridReport {
            name: name.to_string(),
            resolution,
            feasible_points: self.count,
            max_violation: self.violation,
            argmax: self.point[..dims].to_vec(),
            tolerance: GRID_TOL,
        }
    }
}

/// `b sin(pi(a + c/b)) + (1 - b) sin(pi(a - c/(1 - b)))`.
pub fn h(a: f64, b: f64, c: f64) -> f64 {
    b * (PI * (a + c / b)).sin() + (1.0 - b) * (PI * (a - c / (1.0 - b))).sin()
}

/// `h(a, b, c) <= sin(pi a) cos(2 pi c)` on `0 <= a <= 1/2`,
/// `c/(1-a) <= b <= 1/2`, `0 <= c <= b(1-b)`, with `resolution + 1` points
/// per axis (`b = 0` is excluded: it forces `c = 0`, where `h` is undefined
/// but the limit is the trivial equality).
pub fn check_lemma_ineq(resolution: usize) -> LemmaReport {
    let r = resolution.max(10);
    let step = |i: usize, hi: f64| hi * i as f64 / r as f64;
    let worst = (0..=r)
        .into_par_iter()
        .map(|i| {
            let a = step(i, 0.5);
            let mut w = Worst::empty();
            for j in 1..=r {
                let b = step(j, 0.5);
                for l in 0..=r {
                    let c = step(l, 0.25);
                    if c / (1.0 - a) > b + FEASIBLE_SLACK || c > b * (1.0 - b) + FEASIBLE_SLACK {
                        continue;
                    }
                    w = w.add(
                        h(a, b, c) - (PI * a).sin() * (2.0 * PI * c).cos(),
                        [a, b, c],
                    );
                }
            }
            w
        })
        .reduce(Worst::empty, Worst::merge);

    // c = 0 gives equality; a = b = 1/2 gives h = cos(2 pi c).
    let mut boundary: f64 = 0.0;
    for i in 0..=r {
        let x = step(i, 0.5);
        for j in 1..=r {
            let b = step(j, 0.5);
            boundary = boundary.max((h(x, b, 0.0) - (PI * x).sin()).abs());
        }
        let c = step(i, 0.25);
        boundary = boundary.max((h(0.5, 0.5, c) - (2.0 * PI * c).cos()).abs());
    }
    LemmaReport {
        grids: vec![worst.report("h(a,b,c) <= sin(pi a) cos(2 pi c)", r, 3)],
        boundary_max_error: boundary,
        boundary_tolerance: IDENTITY_TOL,
    }
}

fn sinc(z: f64) -> f64 {
    z.sin() / z
}

/// The factor multiplying `sinc(y)` in the sharp form:
/// `(1 - 2y(1 - y/x)/pi) cos(y(1 - y/x) / (1 - 2y(1 - y/x)/pi))`.
fn sinc_drop(x: f64, y: f64) -> f64 {
    let s = y * (1.0 - y / x);
    let k = 1.0 - 2.0 / PI * s;
    k * (s / k).cos()
}

/// `sinc_drop(x, y) - sinc(x) / sinc(y)`; nonnegative on the domain and
/// zero at `y = x` and `y = pi/2`.
pub fn sinc_gap(x: f64, y: f64) -> f64 {
    sinc_drop(x, y) - x.sin() / x * y / y.sin()
}

/// `sinc(x) <= sinc(y) * drop(x, y)` for `pi/2 <= y < x <= pi`, in the sharp
/// form and in the weaker `cos(2y(1 - y/x))` form, plus the boundary
/// identities of the gap function.
pub fn check_lemma_sinc(resolution: usize) -> LemmaReport {
    let r = resolution.max(10);
    let at = |i: usize| FRAC_PI_2 + FRAC_PI_2 * i as f64 / r as f64;
    let run = |rhs: &(dyn Fn(f64, f64) -> f64 + Sync)| {
        (1..=r)
            .into_par_iter()
            .map(|i| {
                let x = at(i);
                (0..i).fold(Worst::empty(), |w, j| {
                    let y = at(j);
                    w.add(sinc(x) - sinc(y) * rhs(x, y), [x, y, 0.0])
                })
            })
            .reduce(Worst::empty, Worst::merge)
    };
    let sharp = run(&sinc_drop);
    let weak = run(&|x: f64, y: f64| (2.0 * y * (1.0 - y / x)).cos());
    let boundary = (0..=r)
        .map(at)
        .map(|x| sinc_gap(x, x).abs().max(sinc_gap(x, FRAC_PI_2).abs()))
        .fold(0.0, f64::max);
    LemmaReport {
        grids: vec![
            sharp.report("sinc(x) <= sinc(y) drop(x, y)", r, 2),
            weak.report("sinc(x) <= sinc(y) cos(2y(1 - y/x))", r, 2),
        ],
        boundary_max_error: boundary,
        boundary_tolerance: IDENTITY_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_identities() {
        assert!((h(0.3, 0.2, 0.0) - (0.3 * PI).sin()).abs() < 1e-15);
        for c in [0.0, 0.05, 0.1, 0.2, 0.25] {
            assert!((h(0.5, 0.5, c) - (2.0 * PI * c).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn sinc_gap_vanishes_on_both_edges() {
        for x in [FRAC_PI_2, 2.0, 2.5, 3.0, PI] {
            assert!(sinc_gap(x, x).abs() < 1e-14);
            assert!(sinc_gap(x, FRAC_PI_2).abs() < 1e-14);
        }
        assert!(sinc_gap(3.0, 2.2) > 0.0);
    }

    #[test]
    fn coarse_grids_pass() {
        let r = check_lemma_ineq(40);
        assert!(r.passed(), "{r:?}");
        assert!(r.grids[0].feasible_points > 1000);
        let s = check_lemma_sinc(40);
        assert!(s.passed(), "{s:?}");
    }
}
