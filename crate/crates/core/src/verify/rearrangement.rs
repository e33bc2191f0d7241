use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::iso::ConcaveFn;

pub const REARRANGEMENT_TOL: f64 = 1e-10;

/// A failing instance of the rearrangement inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementWitness {
    pub trial: usize,
    pub f: ConcaveFn,
    /// Values on equal-width cells of `[0, 1]`.
    pub g: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementReport {
    pub trials: usize,
    pub seed: u64,
    /// Largest `int f(g) - int f(g_hat)` seen.
    pub max_excess: f64,
    pub witness: Option<RearrangementWitness>,
}

impl RearrangementReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// `int_0^1 f(g(u)) du` for a step function on equal-width cells.
pub fn step_integral(f: ConcaveFn, g: &[f64]) -> f64 {
    g.iter().map(|&v| f.eval(v)).sum::<f64>() / g.len() as f64
}

/// Whether `g` and `g_hat` (equal-width cells) are nonincreasing, have equal
/// integrals and `int_0^t g >= int_0^t g_hat` for every `t`.
pub fn dominates(g: &[f64], g_hat: &[f64]) -> bool {
    let nonincreasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let mut lead = 0.0;
    let mut ok = g.len() == g_hat.len() && nonincreasing(g) && nonincreasing(g_hat);
    for (a, b) in g.iter().zip(g_hat) {
        lead += a - b;
        ok &= lead >= -1e-12;
    }
    ok && lead.abs() <= 1e-12
}

/// Random pair `(g, g_hat)` with `g` obtained from `g_hat` by moving mass
/// from later cells to earlier ones while keeping both monotone and inside
/// `[0, 1]`; every such move preserves the prefix-integral dominance.
fn random_pair(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let cells = rng.random_range(2..=12);
    let mut g_hat: Vec<f64> = (0..cells).map(|_| rng.random::<f64>()).collect();
    g_hat.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut g = g_hat.clone();
    for _ in 0..rng.random_range(0..=2 * cells) {
        let i = rng.random_range(0..cells - 1);
        let j = rng.random_range(i + 1..cells);
        let up = if i == 0 { 1.0 } else { g[i - 1] };
        let down = if j + 1 == cells { 0.0 } else { g[j + 1] };
        // Raising i and lowering j keeps every cell between them in order.
        let room = (up - g[i]).min(g[j] - down).max(0.0);
        let delta = room * rng.random::<f64>();
        g[i] += delta;
        g[j] -= delta;
    }
    (g, g_hat)
}

/// `int f(g) <= int f(g_hat)` whenever `g` majorizes `g_hat`, over random
/// pairs and the four concave families.
pub fn check_worst_case_lemma(trials: usize, seed: u64) -> RearrangementReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RearrangementReport {
        trials,
        seed,
        max_excess: f64::NEG_INFINITY,
        witness: None,
    };
    for trial in 0..trials {
        let (g, g_hat) = random_pair(&mut rng);
        debug_assert!(dominates(&g, &g_hat));
        for f in ConcaveFn::ALL {
            let excess = step_integral(f, &g) - step_integral(f, &g_hat);
            report.max_excess = report.max_excess.max(excess);
            if excess > REARRANGEMENT_TOL && report.witness.is_none() {
                report.witness = Some(RearrangementWitness {
                    trial,
                    f,
                    g: g.clone(),
                    g_hat: g_hat.clone(),
                    excess,
                });
            }
        }
    }
    report
}
