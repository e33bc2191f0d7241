use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    full_mask, members, ConcaveFn, CongestionProfile, IsoError, LevelSetProfile, SetView,
    VertexSet, HALF_TOL, MAX_SUBSET_STATES,
};
use crate::chain::{stationary, Rational, StochasticKernel};
use crate::scalar::Real;

/// Subsets sharing the same high bits are enumerated in Gray-code order with
/// incremental flow updates; each block restarts from a fresh sum so rounding
/// drift stays bounded by `2^GRAY_BITS` additions.
const GRAY_BITS: usize = 8;

/// Per-kernel state for the subset enumerations: the stationary distribution,
/// the flow matrix `pi(x) P(x, y)` and the support of each row.
#[derive(Debug, Clone)]
pub struct Isoperimetry<T> {
    pi: Vec<T>,
    flow: Vec<Vec<T>>,
    support: Vec<u32>,
    exact_pi: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// `pi(N(A) \ v) >= pi(A)` for every `pi(A) <= 1/2` and every `v`.
    Measure,
    /// `|N(A)| > |A|` for every `|A| <= n/2`.
    Counting,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ExpansionOutcome {
    Pass,
    /// The violating set with the smallest bitmask; `vertex` is the removed
    /// `v` for the measure kind.
    Violation {
        set: Vec<usize>,
        vertex: Option<usize>,
    },
}

impl ExpansionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, Self::Pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetricSummary<T> {
    pub psi_min: T,
    pub psi_hat_min: T,
    pub delta_min: T,
    pub q_min: T,
    pub pi_star: T,
    pub a_hat_min: T,
    pub a_hat_max: T,
    pub a_max: T,
    pub set_count_examined: u64,
}

impl<T: Real> Isoperimetry<T> {
    pub fn new(k: &StochasticKernel<T>) -> Result<Self, IsoError> {
        let n = k.n();
        if n > MAX_SUBSET_STATES {
            return Err(IsoError::StateSpaceTooLarge {
                n,
                limit: MAX_SUBSET_STATES,
            });
        }
        let pi = stationary(k)?.as_slice().to_vec();
        let flow = (0..n)
            .map(|x| k.row(x).iter().map(|p| pi[x] * *p).collect())
            .collect();
        let support = (0..n)
            .map(|x| k.successors(x).fold(0u32, |acc, y| acc | 1 << y))
            .collect();
        Ok(Self {
            pi,
            flow,
            support,
            exact_pi: k.exact_stationary().map(<[Rational]>::to_vec),
        })
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn stationary(&self) -> &[T] {
        &self.pi
    }

    pub fn set(&self, vertices: &[usize]) -> Result<VertexSet<T>, IsoError> {
        let mut bits = 0u32;
        for &v in vertices {
            if v >= self.n() {
                return Err(IsoError::InvalidSet(format!(
                    "vertex {v} out of range 0..{}",
                    self.n()
                )));
            }
            bits |= 1 << v;
        }
        Ok(self.set_from_bits(bits))
    }

    pub fn set_from_bits(&self, bits: u32) -> VertexSet<T> {
        let bits = bits & full_mask(self.n());
        VertexSet {
            bits,
            n: self.n(),
            measure: self.measure(bits),
        }
    }

    pub fn complement(&self, a: &VertexSet<T>) -> VertexSet<T> {
        self.set_from_bits(!a.bits)
    }

    fn measure(&self, bits: u32) -> T {
        (0..self.n())
            .filter(|v| bits >> v & 1 == 1)
            .map(|v| self.pi[v])
            .sum()
    }

    /// `Q(A, v)` for every `v`.
    pub fn flows_from(&self, a: &VertexSet<T>) -> Vec<T> {
        let mut q = vec![T::zero(); self.n()];
        self.fill_flows(a.bits, &mut q);
        q
    }

    fn fill_flows(&self, bits: u32, q: &mut [T]) {
        q.iter_mut().for_each(|x| *x = T::zero());
        for x in 0..self.n() {
            if bits >> x & 1 == 1 {
                for (acc, f) in q.iter_mut().zip(&self.flow[x]) {
                    *acc = *acc + *f;
                }
            }
        }
    }

    /// `Q(A, B) = sum_{x in A, y in B} pi(x) P(x, y)`.
    pub fn ergodic_flow(&self, a: &VertexSet<T>, b: &VertexSet<T>) -> T {
        let mut total = T::zero();
        for x in a.members() {
            for y in b.members() {
                total = total + self.flow[x][y];
            }
        }
        total
    }

    pub fn view(&self, a: &VertexSet<T>) -> Result<SetView<'_, T>, IsoError> {
        if !a.is_proper() {
            return Err(IsoError::EmptyOrFullSet);
        }
        Ok(SetView::new(&self.pi, a.bits, &self.flows_from(a)))
    }

    pub fn level_set_profile(&self, a: &VertexSet<T>) -> Result<LevelSetProfile<T>, IsoError> {
        Ok(self.view(a)?.profile())
    }

    pub fn psi_area(&self, a: &VertexSet<T>) -> Result<T, IsoError> {
        Ok(self.view(a)?.psi_area())
    }

    pub fn psi_flow(&self, a: &VertexSet<T>) -> Result<T, IsoError> {
        Ok(self.view(a)?.psi())
    }

    pub fn psi_hat(&self, a: &VertexSet<T>) -> Result<T, IsoError> {
        Ok(self.view(a)?.psi_hat())
    }

    pub fn f_congestion(&self, a: &VertexSet<T>, f: ConcaveFn) -> Result<T, IsoError> {
        self.view(a)?.congestion(f).ok_or(IsoError::ZeroDenominator)
    }

    /// Visits every nonempty proper subset in parallel. `visit` folds into a
    /// per-block accumulator; `combine` must be order-independent.
    pub fn scan<R, I, V, C>(&self, init: I, visit: V, combine: C) -> R
    where
        R: Send,
        I: Fn() -> R + Sync + Send,
        V: Fn(&mut R, &SetView<'_, T>) + Sync + Send,
        C: Fn(R, R) -> R + Sync + Send,
    {
        let n = self.n();
        let low = n.min(GRAY_BITS);
        let full = full_mask(n);
        let blocks = 1u32 << (n - low);
        (0..blocks)
            .into_par_iter()
            .map(|block| {
                let mut acc = init();
                let base = block << low;
                let mut q = vec![T::zero(); n];
                self.fill_flows(base, &mut q);
                let mut gray = 0u32;
                for i in 0u32..1 << low {
                    if i > 0 {
                        let bit = i.trailing_zeros() as usize;
                        gray ^= 1 << bit;
                        let row = &self.flow[bit];
                        if gray >> bit & 1 == 1 {
                            q.iter_mut().zip(row).for_each(|(a, f)| *a = *a + *f);
                        } else {
                            q.iter_mut().zip(row).for_each(|(a, f)| *a = *a - *f);
                        }
                    }
                    let bits = base | gray;
                    if bits == 0 || bits == full {
                        continue;
                    }
                    visit(&mut acc, &SetView::new(&self.pi, bits, &q));
                }
                acc
            })
            .reduce(&init, &combine)
    }

    fn at_most_half(measure: T) -> bool {
        measure <= T::lit(0.5 + HALF_TOL)
    }

    /// `min |pi(A) - pi(B)|` over subset measures that differ.
    pub fn delta_min(&self) -> T {
        if let Some(d) = self.exact_delta_min() {
            return d;
        }
        let n = self.n();
        let mut sums = vec![T::zero(); 1 << n];
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + self.pi[low];
        }
        sums.par_sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let tol = T::lit(1e-12);
        let mut best = T::infinity();
        let mut prev = sums[0];
        for &s in &sums[1..] {
            let gap = s - prev;
            if gap > tol {
                best = best.min(gap);
                prev = s;
            }
        }
        best
    }

    /// Integer subset sums over a common denominator, when it fits.
    fn exact_delta_min(&self) -> Option<T> {
        let exact = self.exact_pi.as_ref()?;
        let mut lcm: i64 = 1;
        for q in exact {
            let l = lcm.lcm(q.denom());
            if l > 1 << 40 {
                return None;
            }
            lcm = l;
        }
        let weights: Vec<i64> = exact
            .iter()
            .map(|q| q.numer() * (lcm / q.denom()))
            .collect();
        let n = weights.len();
        let mut sums = vec![0i64; 1 << n];
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + weights[low];
        }
        sums.par_sort_unstable();
        sums.dedup();
        let gap = sums.windows(2).map(|w| w[1] - w[0]).min()?;
        Some(T::lit(gap as f64) / T::lit(lcm as f64))
    }

    /// `pi_* = min_x pi(x)`.
    pub fn pi_star(&self) -> T {
        self.pi.iter().copied().fold(T::infinity(), T::min)
    }

    /// `min_A Q(A, A^c)` over nonempty proper `A`.
    pub fn q_min(&self) -> T {
        self.scan(|| T::infinity(), |m, v| *m = m.min(v.cut()), T::min)
    }

    /// `min_A Psi(A)` over every nonempty proper `A`, not only `pi(A) <= 1/2`.
    pub fn psi_min_all(&self) -> T {
        self.scan(|| T::infinity(), |m, v| *m = m.min(v.psi()), T::min)
    }

    /// Distinct measures of nonempty proper sets, ascending; values within
    /// 1e-12 of each other are merged.
    pub fn subset_measures(&self) -> Vec<T> {
        let mut all = self.scan(
            Vec::new,
            |acc: &mut Vec<T>, v| acc.push(v.measure()),
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.dedup_by(|b, a| *b - *a <= T::tol(1e-12));
        all
    }

    /// `C_f`: the largest `C_f(A)` over nonempty `A` with `pi(A) <= 1/2`, or
    /// over every proper `A` when `restrict_to_half` is off.
    pub fn c_f(&self, f: ConcaveFn, restrict_to_half: bool) -> T {
        self.c_f_with_witness(f, restrict_to_half).0
    }

    /// `C_f` together with the maximizing set (smallest bitmask on ties).
    /// `C_f` over the sets the contraction argument ranges over for `f`:
    /// `pi(A) <= 1/2` when `f` is reflection-dominated, all sets otherwise.
    pub fn contraction_c_f(&self, f: ConcaveFn) -> T {
        self.c_f(f, f.reflection_dominated())
    }

    pub fn c_f_with_witness(&self, f: ConcaveFn, restrict_to_half: bool) -> (T, u32) {
        let pick = |a: (T, u32), b: (T, u32)| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        };
        self.scan(
            || (T::neg_infinity(), u32::MAX),
            |best, v| {
                if restrict_to_half && !Self::at_most_half(v.measure()) {
                    return;
                }
                if let Some(c) = v.congestion(f) {
                    *best = pick(*best, (c, v.bits()));
                }
            },
            pick,
        )
    }

    /// `r -> max_{pi(A) <= r} C_f(A)` over nonempty proper `A`.
    pub fn c_f_profile(&self, f: ConcaveFn) -> CongestionProfile<T> {
        let sets = self.scan(
            Vec::new,
            |acc: &mut Vec<(T, T)>, v| {
                if let Some(c) = v.congestion(f) {
                    acc.push((v.measure(), c));
                }
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        CongestionProfile::from_sets(f, sets)
    }

    pub fn summarize(&self) -> Result<IsoperimetricSummary<T>, IsoError> {
        #[derive(Clone, Copy)]
        struct Acc<T> {
            psi: T,
            psi_hat: T,
            cut: T,
            count: u64,
        }
        let acc = self.scan(
            || Acc {
                psi: T::infinity(),
                psi_hat: T::infinity(),
                cut: T::infinity(),
                count: 0,
            },
            |acc, v| {
                acc.cut = acc.cut.min(v.cut());
                if Self::at_most_half(v.measure()) {
                    acc.psi = acc.psi.min(v.psi());
                    acc.psi_hat = acc.psi_hat.min(v.psi_hat());
                    acc.count += 1;
                }
            },
            |a, b| Acc {
                psi: a.psi.min(b.psi),
                psi_hat: a.psi_hat.min(b.psi_hat),
                cut: a.cut.min(b.cut),
                count: a.count + b.count,
            },
        );
        if acc.count == 0 {
            return Err(IsoError::EmptyOrFullSet);
        }
        let delta_min = self.delta_min();
        let half_delta = T::lit(0.5) * delta_min;
        Ok(IsoperimetricSummary {
            psi_min: acc.psi,
            psi_hat_min: acc.psi_hat,
            delta_min,
            q_min: acc.cut,
            pi_star: self.pi_star(),
            a_hat_min: acc.psi_hat.min(half_delta),
            a_hat_max: acc.psi_hat.max(half_delta),
            a_max: acc.psi.max(half_delta),
            set_count_examined: acc.count,
        })
    }

    /// `N(A) = {y : P(x, y) > 0 for some x in A}`.
    fn neighbourhood(&self, bits: u32) -> u32 {
        (0..self.n())
            .filter(|x| bits >> x & 1 == 1)
            .fold(0, |acc, x| acc | self.support[x])
    }

    pub fn expansion_check(&self, kind: ExpansionKind) -> ExpansionOutcome {
        let n = self.n();
        let tol = T::lit(1e-12);
        let first = (1u32..=full_mask(n))
            .into_par_iter()
            .filter_map(|bits| {
                let nb = self.neighbourhood(bits);
                match kind {
                    ExpansionKind::Counting => {
                        let size = bits.count_ones();
                        (2 * size as usize <= n && nb.count_ones() <= size).then_some((bits, None))
                    }
                    ExpansionKind::Measure => {
                        let a = self.measure(bits);
                        if !Self::at_most_half(a) {
                            return None;
                        }
                        // the worst v to remove is the heaviest member of N(A)
                        let heaviest = members(nb, n).into_iter().max_by(|x, y| {
                            self.pi[*x]
                                .partial_cmp(&self.pi[*y])
                                .unwrap()
                                .then(y.cmp(x))
                        });
                        let rest = self.measure(nb) - heaviest.map_or(T::zero(), |v| self.pi[v]);
                        (rest < a - tol).then_some((bits, heaviest))
                    }
                }
            })
            .min_by_key(|(bits, _)| *bits);
        match first {
            None => ExpansionOutcome::Pass,
            Some((bits, vertex)) => ExpansionOutcome::Violation {
                set: members(bits, n),
                vertex,
            },
        }
    }
}
