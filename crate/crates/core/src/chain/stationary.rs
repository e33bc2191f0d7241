use serde::{Deserialize, Serialize};

use super::kernel::{ratio_to_real, StochasticKernel};
use super::ChainError;
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// Above this state count the stationary solver switches from a dense
/// direct solve to power iteration on the lazy kernel.
pub const DIRECT_SOLVE_LIMIT: usize = 512;

/// Probability vector over the states of a kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution<T> {
    weights: Vec<T>,
}

impl<T: Real> Distribution<T> {
    pub fn new(weights: Vec<T>) -> Result<Self, ChainError> {
        if weights.is_empty() {
            return Err(ChainError::EmptyStateSpace);
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(ChainError::InvalidDistribution(format!(
                "weight {w} is negative"
            )));
        }
        let sum: T = weights.iter().copied().sum();
        let tol = T::tol(1e-12) * T::from_count(weights.len()).sqrt().max(T::one());
        if (sum - T::one()).abs() > tol {
            return Err(ChainError::InvalidDistribution(format!(
                "weights sum to {sum}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![T::one() / T::from_count(n); n],
        }
    }

    pub fn point_mass(n: usize, x: usize) -> Self {
        let mut weights = vec![T::zero(); n];
        weights[x] = T::one();
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    pub fn get(&self, x: usize) -> T {
        self.weights[x]
    }

    /// Smallest weight, `pi_*` for a stationary distribution.
    pub fn min_weight(&self) -> T {
        self.weights.iter().copied().fold(T::infinity(), T::min)
    }

    /// `|| pi P - pi ||_1`.
    pub fn invariance_residual(&self, k: &StochasticKernel<T>) -> T {
        let next = k.matrix().left_mul(&self.weights);
        next.iter()
            .zip(&self.weights)
            .map(|(a, b)| (*a - *b).abs())
            .sum()
    }
}

/// Stationary distribution of an irreducible kernel.
///
/// Uses the exact rational distribution when the constructor verified one,
/// otherwise solves `pi (P - I) = 0, sum pi = 1` by Gaussian elimination with
/// partial pivoting (power iteration on `(I + P) / 2` past
/// [`DIRECT_SOLVE_LIMIT`] states).
pub fn stationary<T: Real>(k: &StochasticKernel<T>) -> Result<Distribution<T>, ChainError> {
    if !k.is_irreducible() {
        return Err(ChainError::NotIrreducible);
    }
    if let Some(exact) = k.exact_stationary() {
        return Distribution::new(exact.iter().map(|q| ratio_to_real(*q)).collect());
    }
    let n = k.n();
    let mut weights = if n > DIRECT_SOLVE_LIMIT {
        power_iteration(k)
    } else {
        direct_solve(k)?
    };
    for w in &mut weights {
        *w = w.max(T::zero());
    }
    let total: T = weights.iter().copied().sum();
    for w in &mut weights {
        *w = *w / total;
    }
    let mut pi = Distribution { weights };
    // one sweep of P-smoothing tightens the invariance residual
    let tol = T::tol(1e-12);
    if pi.invariance_residual(k) > tol {
        let next = k.matrix().left_mul(pi.as_slice());
        let total: T = next.iter().copied().sum();
        pi = Distribution {
            weights: next.into_iter().map(|w| w / total).collect(),
        };
    }
    Ok(pi)
}

fn direct_solve<T: Real>(k: &StochasticKernel<T>) -> Result<Vec<T>, ChainError> {
    let n = k.n();
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    let mut a = SquareMatrix::from_fn(n, |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        k.p(j, i) - id
    });
    let mut b = vec![T::zero(); n];
    for j in 0..n {
        a[(n - 1, j)] = T::one();
    }
    b[n - 1] = T::one();
    solve_in_place(&mut a, &mut b)?;
    Ok(b)
}

/// Gaussian elimination with partial pivoting; the solution overwrites `b`.
pub fn solve_in_place<T: Real>(a: &mut SquareMatrix<T>, b: &mut [T]) -> Result<(), ChainError> {
    let n = a.dim();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[(r, col)].abs().partial_cmp(&a[(s, col)].abs()).unwrap())
            .unwrap_or(col);
        if a[(pivot, col)].abs() <= T::epsilon() {
            return Err(ChainError::SingularSystem);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            b.swap(col, pivot);
        }
        let d = a[(col, col)];
        for r in col + 1..n {
            let factor = a[(r, col)] / d;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                a[(r, j)] = a[(r, j)] - factor * a[(col, j)];
            }
            b[r] = b[r] - factor * b[col];
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for j in r + 1..n {
            acc = acc - a[(r, j)] * b[j];
        }
        b[r] = acc / a[(r, r)];
    }
    Ok(())
}

fn power_iteration<T: Real>(k: &StochasticKernel<T>) -> Vec<T> {
    let n = k.n();
    let half = T::lit(0.5);
    let mut w = vec![T::one() / T::from_count(n); n];
    for _ in 0..100_000 {
        let step = k.matrix().left_mul(&w);
        let next: Vec<T> = w.iter().zip(&step).map(|(a, b)| half * (*a + *b)).collect();
        let delta: T = next.iter().zip(&w).map(|(a, b)| (*a - *b).abs()).sum();
        w = next;
        if delta <= T::epsilon() * T::from_count(n) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_chain() {
        let k = StochasticKernel::<f64>::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let pi = stationary(&k).unwrap();
        // balance 0.1 pi0 = 0.2 pi1
        assert!((pi.get(0) - 2.0 / 3.0).abs() < 1e-14);
        assert!((pi.get(1) - 1.0 / 3.0).abs() < 1e-14);
        assert!(pi.invariance_residual(&k) <= 1e-12);
    }

    #[test]
    fn doubly_stochastic_is_uniform() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| {
                        if (j + 5 - i) % 5 == 1 {
                            0.7
                        } else if j == i {
                            0.3
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let k = StochasticKernel::from_rows(&rows).unwrap();
        let pi = stationary(&k).unwrap();
        for x in 0..5 {
            assert!((pi.get(x) - 0.2).abs() < 1e-14);
        }
    }

    #[test]
    fn reducible_kernel_rejected() {
        let k = StochasticKernel::<f64>::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(stationary(&k), Err(ChainError::NotIrreducible)));
    }

    #[test]
    fn power_iteration_agrees_with_direct_solve() {
        let k = StochasticKernel::<f64>::from_rows(&[
            vec![0.0, 0.7, 0.3],
            vec![0.4, 0.0, 0.6],
            vec![0.5, 0.5, 0.0],
        ])
        .unwrap();
        let direct = stationary(&k).unwrap();
        let power = power_iteration(&k);
        for x in 0..3 {
            assert!((direct.get(x) - power[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert_eq!(Distribution::<f64>::uniform(4).min_weight(), 0.25);
    }
}
