//! Walk constructors and kernel transforms.

use serde::{Deserialize, Serialize};

use super::graph::DirectedMultigraph;
use super::kernel::{Rational, StochasticKernel};
use super::stationary::stationary;
use super::ChainError;
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// Simple random walk: move along a uniformly chosen out-arc.
///
/// On an Eulerian graph the stationary distribution `deg(v) / m` is verified
/// in exact arithmetic and attached to the kernel.
pub fn build_simple_walk<T: Real>(
    g: &DirectedMultigraph,
) -> Result<StochasticKernel<T>, ChainError> {
    let out = g.out_degrees();
    if let Some(v) = out.iter().position(|&d| d == 0) {
        return Err(ChainError::VertexWithNoOutEdge(v));
    }
    if !g.is_strongly_connected() {
        return Err(ChainError::NotStronglyConnected);
    }
    let counts = g.multiplicity_matrix();
    let rows: Vec<Vec<Rational>> = counts
        .iter()
        .zip(&out)
        .map(|(row, &deg)| row.iter().map(|&c| ratio(c, deg)).collect())
        .collect();
    let mut k = StochasticKernel::from_exact_rows(&rows)?;
    if let Some(labels) = g.labels() {
        k = k.with_labels(labels.to_vec())?;
    }
    if g.is_balanced() {
        let m = g.edge_count();
        let pi = out.iter().map(|&d| ratio(d, m)).collect();
        k = k.with_exact_stationary(pi)?;
    }
    Ok(k)
}

/// Max-degree walk: each out-arc with probability `1/d`, hold otherwise.
pub fn build_max_degree_walk<T: Real>(
    g: &DirectedMultigraph,
    d: u64,
) -> Result<StochasticKernel<T>, ChainError> {
    let max = g.max_out_degree();
    if d < max || d == 0 {
        return Err(ChainError::DegreeBoundTooSmall { d, max_degree: max });
    }
    if !g.is_eulerian() {
        return Err(ChainError::NotEulerian);
    }
    let out = g.out_degrees();
    let counts = g.multiplicity_matrix();
    let rows: Vec<Vec<Rational>> = counts
        .iter()
        .enumerate()
        .map(|(x, row)| {
            row.iter()
                .enumerate()
                .map(|(y, &c)| {
                    let hold = if x == y {
                        ratio(d - out[x], d)
                    } else {
                        Rational::from_integer(0)
                    };
                    ratio(c, d) + hold
                })
                .collect()
        })
        .collect();
    let n = g.vertex_count();
    let mut k = StochasticKernel::from_exact_rows(&rows)?;
    if let Some(labels) = g.labels() {
        k = k.with_labels(labels.to_vec())?;
    }
    k.with_exact_stationary(vec![ratio(1, n as u64); n])
}

/// Cycle on an odd number of states drifting clockwise:
/// `P(x, x+1) = (d-1)/d`, `P(x, x-1) = 1/d`.
pub fn build_drifted_cycle<T: Real>(n: usize, d: u32) -> Result<StochasticKernel<T>, ChainError> {
    if n < 3 || n.is_multiple_of(2) || d < 2 {
        return Err(ChainError::InvalidParameters(format!(
            "drifted cycle needs odd n >= 3 and d >= 2, got n={n}, d={d}"
        )));
    }
    let g = DirectedMultigraph::drifted_cycle(n, d)?;
    build_max_degree_walk(&g, u64::from(d))
}

/// Cycle walk holding with probability `(d-2)/d`: the simple walk on a cycle
/// with `d - 2` self-loops per vertex.
pub fn build_self_looped_cycle<T: Real>(
    n: usize,
    d: u32,
) -> Result<StochasticKernel<T>, ChainError> {
    if n < 3 || d < 2 {
        return Err(ChainError::InvalidParameters(format!(
            "self-looped cycle needs n >= 3 and d >= 2, got n={n}, d={d}"
        )));
    }
    let g = DirectedMultigraph::undirected_cycle(n)?.with_self_loops(d - 2);
    build_simple_walk(&g)
}

/// `P(x, y) = 1/(n-1)` for `x != y`.
pub fn build_complete_graph_walk<T: Real>(n: usize) -> Result<StochasticKernel<T>, ChainError> {
    build_simple_walk(&DirectedMultigraph::complete(n)?)
}

/// Time reversal `P*(x, y) = pi(y) P(y, x) / pi(x)`.
pub fn reverse<T: Real>(k: &StochasticKernel<T>) -> Result<StochasticKernel<T>, ChainError> {
    let pi = stationary(k)?;
    let n = k.n();
    let m = SquareMatrix::from_fn(n, |x, y| pi.get(y) * k.p(y, x) / pi.get(x));
    let mut r = StochasticKernel::from_matrix(m)?;
    if let (Some(exact), Some(epi)) = (k.exact_transitions(), k.exact_stationary()) {
        let rev = (0..n * n)
            .map(|idx| {
                let (x, y) = (idx / n, idx % n);
                epi[y] * exact[y * n + x] / epi[x]
            })
            .collect();
        r.set_exact(Some(rev));
        r = r.with_exact_stationary(epi.to_vec())?;
    }
    copy_labels(k, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// `(I + P) / 2`
    Lazy,
    /// `(P + P*) / 2`
    AdditiveSymmetrize,
    /// `I/2 + (P + P*) / 4`
    HalfLazySymmetrize,
}

impl std::str::FromStr for TransformKind {
    type Err = ChainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lazy" => Ok(Self::Lazy),
            "additive_symmetrize" | "additive-symmetrize" => Ok(Self::AdditiveSymmetrize),
            "half_lazy_symmetrize" | "half-lazy-symmetrize" => Ok(Self::HalfLazySymmetrize),
            other => Err(ChainError::InvalidParameters(format!(
                "unknown transform `{other}`"
            ))),
        }
    }
}

/// Applies one of the stationary-preserving transforms.
pub fn transform<T: Real>(
    k: &StochasticKernel<T>,
    kind: TransformKind,
) -> Result<StochasticKernel<T>, ChainError> {
    if !k.is_irreducible() {
        return Err(ChainError::NotIrreducible);
    }
    let n = k.n();
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let id = |x: usize, y: usize| if x == y { T::one() } else { T::zero() };
    let (m, exact) = match kind {
        TransformKind::Lazy => {
            let m = SquareMatrix::from_fn(n, |x, y| half * (id(x, y) + k.p(x, y)));
            let exact = k.exact_transitions().map(|e| {
                (0..n * n)
                    .map(|i| (e[i] + exact_id(i, n)) / Rational::from_integer(2))
                    .collect()
            });
            (m, exact)
        }
        TransformKind::AdditiveSymmetrize | TransformKind::HalfLazySymmetrize => {
            let r = reverse(k)?;
            let m = if kind == TransformKind::AdditiveSymmetrize {
                SquareMatrix::from_fn(n, |x, y| half * (k.p(x, y) + r.p(x, y)))
            } else {
                SquareMatrix::from_fn(n, |x, y| {
                    half * id(x, y) + quarter * (k.p(x, y) + r.p(x, y))
                })
            };
            let exact = match (k.exact_transitions(), r.exact_transitions()) {
                (Some(a), Some(b)) => Some(
                    (0..n * n)
                        .map(|i| {
                            let sym = (a[i] + b[i]) / Rational::from_integer(2);
                            if kind == TransformKind::AdditiveSymmetrize {
                                sym
                            } else {
                                (exact_id(i, n) + sym) / Rational::from_integer(2)
                            }
                        })
                        .collect(),
                ),
                _ => None,
            };
            (m, exact)
        }
    };
    let mut out = StochasticKernel::from_matrix(m)?;
    out.set_exact(exact);
    if let Some(epi) = k.exact_stationary() {
        if out.exact_transitions().is_some() {
            out = out.with_exact_stationary(epi.to_vec())?;
        }
    }
    copy_labels(k, out)
}

fn copy_labels<T: Real>(
    from: &StochasticKernel<T>,
    to: StochasticKernel<T>,
) -> Result<StochasticKernel<T>, ChainError> {
    match from.labels() {
        Some(l) => to.with_labels(l.to_vec()),
        None => Ok(to),
    }
}

fn exact_id(i: usize, n: usize) -> Rational {
    Rational::from_integer(i64::from(i / n == i % n))
}

fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(num as i64, den as i64)
}
