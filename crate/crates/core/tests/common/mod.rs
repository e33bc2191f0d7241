#![allow(dead_code)]

use evoset_core::chain::StochasticKernel;
use proptest::prelude::*;

/// Irreducible kernel from integer weights: row `x` always carries some
/// weight on `x + 1`, the rest is arbitrary.
pub fn kernel_from_weights(n: usize, weights: &[u32]) -> StochasticKernel<f64> {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            let mut w: Vec<f64> = (0..n).map(|y| f64::from(weights[x * n + y])).collect();
            w[(x + 1) % n] += 1.0;
            let total: f64 = w.iter().sum();
            w.iter().map(|v| v / total).collect()
        })
        .collect();
    StochasticKernel::from_rows(&rows).unwrap()
}

/// Sparse-ish irreducible kernels on 2..=max_n states.
pub fn arb_kernel(max_n: usize) -> impl Strategy<Value = StochasticKernel<f64>> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![3 => Just(0u32), 2 => 1u32..6], n * n)
            .prop_map(move |w| kernel_from_weights(n, &w))
    })
}

pub fn members(bits: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|v| bits >> v & 1 == 1).collect()
}

/// `sum_{x in A, y in B} pi(x) P(x, y)` straight from the definition.
pub fn flow(k: &StochasticKernel<f64>, pi: &[f64], a: u32, b: u32) -> f64 {
    let n = k.n();
    let mut total = 0.0;
    for x in members(a, n) {
        for y in members(b, n) {
            total += pi[x] * k.p(x, y);
        }
    }
    total
}

pub fn measure(pi: &[f64], bits: u32) -> f64 {
    members(bits, pi.len()).iter().map(|v| pi[*v]).sum()
}

/// Minimum over all `(B, v)` with `pi(B) <= pi(A^c) < pi(B + v)` of
/// `Q(A, B) + (pi(A^c) - pi(B)) / pi(v) * Q(A, v)`, capping each `Q(A, x)`
/// at `cap * pi(x)`.
pub fn psi_by_enumeration(k: &StochasticKernel<f64>, pi: &[f64], a: u32, cap: f64) -> f64 {
    let n = k.n();
    let full = (1u32 << n) - 1;
    let target = measure(pi, full & !a);
    let capped = |x: usize| flow(k, pi, a, 1 << x).min(cap * pi[x]);
    let mut best = f64::INFINITY;
    for b in 0..=full {
        let mb = measure(pi, b);
        if mb > target + 1e-13 {
            continue;
        }
        let qb: f64 = members(b, n).iter().map(|x| capped(*x)).sum();
        if (mb - target).abs() <= 1e-13 {
            best = best.min(qb);
            continue;
        }
        for (v, &pv) in pi.iter().enumerate().take(n) {
            if b >> v & 1 == 0 && mb + pv > target {
                best = best.min(qb + (target - mb) / pv * capped(v));
            }
        }
    }
    best
}

/// `pi(A_u)` by the definition `{v : Q(A, v) >= u pi(v)}`.
pub fn level_measure(k: &StochasticKernel<f64>, pi: &[f64], a: u32, u: f64) -> f64 {
    (0..k.n())
        .filter(|&v| flow(k, pi, a, 1 << v) >= u * pi[v])
        .map(|v| pi[v])
        .sum()
}

pub fn level_complement(k: &StochasticKernel<f64>, pi: &[f64], a: u32, u: f64) -> f64 {
    (0..k.n())
        .filter(|&v| flow(k, pi, a, 1 << v) < u * pi[v])
        .map(|v| pi[v])
        .sum()
}

/// `int_0^1 g(pi(A_u), pi(A_u^c)) du` by splitting `[0, 1]` at every ratio
/// `Q(A, v) / pi(v)` and sampling each piece at its midpoint.
pub fn level_integral(
    k: &StochasticKernel<f64>,
    pi: &[f64],
    a: u32,
    g: impl Fn(f64, f64) -> f64,
) -> f64 {
    let mut cuts: Vec<f64> = (0..k.n())
        .map(|v| (flow(k, pi, a, 1 << v) / pi[v]).clamp(0.0, 1.0))
        .collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let u = 0.5 * (w[0] + w[1]);
            (w[1] - w[0]) * g(level_measure(k, pi, a, u), level_complement(k, pi, a, u))
        })
        .sum()
}
