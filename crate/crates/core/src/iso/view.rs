use super::{ConcaveFn, LevelSetProfile, VertexSet, MAX_SUBSET_STATES};
use crate::scalar::Real;

/// One subset together with its flow ratios `q_v = Q(A, v) / pi(v)`, sorted
/// ascending (ties by vertex id). Everything the enumerations need per set is
/// computed from this without allocating.
#[derive(Debug, Clone)]
pub struct SetView<'a, T> {
    pi: &'a [T],
    bits: u32,
    measure: T,
    complement: T,
    cut: T,
    ratios: [T; MAX_SUBSET_STATES],
    order: [u8; MAX_SUBSET_STATES],
}

impl<'a, T: Real> SetView<'a, T> {
    /// `flows[v] = Q(A, v)`.
    pub(crate) fn new(pi: &'a [T], bits: u32, flows: &[T]) -> Self {
        let n = pi.len();
        let mut ratios = [T::zero(); MAX_SUBSET_STATES];
        let mut order = [0u8; MAX_SUBSET_STATES];
        let mut measure = T::zero();
        let mut complement = T::zero();
        let mut cut = T::zero();
        for v in 0..n {
            ratios[v] = (flows[v] / pi[v]).max(T::zero()).min(T::one());
            order[v] = v as u8;
            if bits >> v & 1 == 1 {
                measure = measure + pi[v];
            } else {
                complement = complement + pi[v];
                cut = cut + flows[v];
            }
        }
        // insertion sort: stable, so equal ratios stay in id order
        for i in 1..n {
            let mut j = i;
            while j > 0 && ratios[order[j - 1] as usize] > ratios[order[j] as usize] {
                order.swap(j - 1, j);
                j -= 1;
            }
        }
        Self {
            pi,
            bits,
            measure,
            complement,
            cut,
            ratios,
            order,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn set(&self) -> VertexSet<T> {
        VertexSet {
            bits: self.bits,
            n: self.pi.len(),
            measure: self.measure,
        }
    }

    /// `pi(A)`.
    pub fn measure(&self) -> T {
        self.measure
    }

    /// `pi(A^c)`, summed directly rather than as `1 - pi(A)`.
    pub fn complement_measure(&self) -> T {
        self.complement
    }

    /// `Q(A, A^c)`.
    pub fn cut(&self) -> T {
        self.cut
    }

    /// `q_v = Q(A, v) / pi(v)` clamped to `[0, 1]`.
    pub fn ratio(&self, v: usize) -> T {
        self.ratios[v]
    }

    fn n(&self) -> usize {
        self.pi.len()
    }

    /// Fractional greedy: fill `pi(A^c)` with the smallest ratios first.
    fn greedy(&self, cap: T) -> T {
        let target = self.complement;
        let mut acc = T::zero();
        let mut flow = T::zero();
        for &v in &self.order[..self.n()] {
            let v = v as usize;
            let r = self.ratios[v].min(cap);
            let w = self.pi[v];
            if acc + w <= target {
                flow = flow + w * r;
                acc = acc + w;
            } else {
                flow = flow + (target - acc).max(T::zero()) * r;
                break;
            }
        }
        flow
    }

    /// Smallest flow from `A` into a set of measure `pi(A^c)`.
    pub fn psi(&self) -> T {
        self.greedy(T::one())
    }

    /// The same with each `Q(A, v)` capped at `pi(v) / 2`.
    pub fn psi_hat(&self) -> T {
        self.greedy(T::lit(0.5))
    }

    /// Walk the level sets from the largest ratio down: calls
    /// `visit(lo, hi, pi(A_u), pi(V \ A_u))` for each interval `u in (lo, hi]`,
    /// including the top interval `(max q, 1]` where `A_u` is empty.
    /// Intervals may be empty when ratios tie.
    fn level_sets(&self, mut visit: impl FnMut(T, T, T, T)) {
        let n = self.n();
        // below[k] = mass of the k smallest-ratio vertices
        let mut below = [T::zero(); MAX_SUBSET_STATES + 1];
        for k in 0..n {
            below[k + 1] = below[k] + self.pi[self.order[k] as usize];
        }
        let mut mass = T::zero();
        let top = self.ratios[self.order[n - 1] as usize];
        visit(top, T::one(), T::zero(), below[n]);
        for k in (0..n).rev() {
            let v = self.order[k] as usize;
            mass = mass + self.pi[v];
            let hi = self.ratios[v];
            let lo = if k == 0 {
                T::zero()
            } else {
                self.ratios[self.order[k - 1] as usize]
            };
            visit(lo, hi, mass, below[k]);
        }
    }

    /// `1/2 int_0^1 |pi(A_u) - pi(A)| du`.
    pub fn psi_area(&self) -> T {
        let mut total = T::zero();
        self.level_sets(|lo, hi, m, _| total = total + (hi - lo) * (m - self.measure).abs());
        T::lit(0.5) * total
    }

    /// `int_0^1 pi(A_u) du`; equals `pi(A)`.
    pub fn profile_integral(&self) -> T {
        let mut total = T::zero();
        self.level_sets(|lo, hi, m, _| total = total + (hi - lo) * m);
        total
    }

    /// `int_0^1 f(pi(A_u)) du`.
    pub fn integrate(&self, f: ConcaveFn) -> T {
        let mut total = T::zero();
        self.level_sets(|lo, hi, m, rest| {
            if hi > lo {
                total = total + (hi - lo) * f.eval_split(m, rest);
            }
        });
        total
    }

    /// `int_0^1 f(pi(A_u)^#) du`, where `a^# = min(a, 1 - a)`.
    pub fn integrate_folded(&self, f: ConcaveFn) -> T {
        let mut total = T::zero();
        self.level_sets(|lo, hi, m, rest| {
            if hi > lo {
                total = total + (hi - lo) * f.eval_split(m.min(rest), m.max(rest));
            }
        });
        total
    }

    /// `int f(pi(A_u)) du / f(pi(A))`, or `None` when the denominator vanishes.
    pub fn congestion(&self, f: ConcaveFn) -> Option<T> {
        let denom = f.eval_split(self.measure, self.complement);
        if denom <= T::zero() {
            return None;
        }
        Some(self.integrate(f) / denom)
    }

    pub fn profile(&self) -> LevelSetProfile<T> {
        let mut segments: Vec<(T, T)> = Vec::with_capacity(self.n() + 1);
        // level_sets runs from u = 1 downwards
        self.level_sets(|lo, hi, m, _| {
            if hi > lo {
                segments.push((lo, m));
            }
        });
        segments.reverse();
        LevelSetProfile::from_segments(segments, self.measure)
    }
}
