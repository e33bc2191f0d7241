use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use super::graph::strongly_connected;
use super::ChainError;
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// Exact rational value carried alongside the floating point kernel.
pub type Rational = Ratio<i64>;

/// Largest denominator admitted into the exact side channel.
pub const MAX_EXACT_DENOMINATOR: i64 = 1_000_000;

/// Row-stochastic transition matrix on states `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticKernel<T> {
    matrix: SquareMatrix<T>,
    labels: Option<Vec<String>>,
    exact: Option<Vec<Rational>>,
    exact_stationary: Option<Vec<Rational>>,
    irreducible: bool,
}

impl<T: Real> StochasticKernel<T> {
    /// Validates entries and row sums. Entries within `1e-15` outside `[0, 1]`
    /// are clamped, row sums must equal one within `1e-12`.
    pub fn from_matrix(mut matrix: SquareMatrix<T>) -> Result<Self, ChainError> {
        let n = matrix.dim();
        if n == 0 {
            return Err(ChainError::EmptyStateSpace);
        }
        let slack = T::tol(1e-15);
        let row_tol = T::tol(1e-12) * T::from_count(n.max(1)).sqrt().max(T::one());
        for i in 0..n {
            for j in 0..n {
                let p = matrix[(i, j)];
                if !p.is_finite() || p < -slack || p > T::one() + slack {
                    return Err(ChainError::InvalidKernel(format!(
                        "entry ({i}, {j}) = {p} outside [0, 1]"
                    )));
                }
                matrix[(i, j)] = p.max(T::zero()).min(T::one());
            }
            let sum: T = matrix.row(i).iter().copied().sum();
            if (sum - T::one()).abs() > row_tol {
                return Err(ChainError::InvalidKernel(format!(
                    "row {i} sums to {sum}, expected 1"
                )));
            }
        }
        let irreducible = strongly_connected(&support(&matrix));
        Ok(Self {
            matrix,
            labels: None,
            exact: None,
            exact_stationary: None,
            irreducible,
        })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, ChainError> {
        let matrix = SquareMatrix::from_rows(rows)
            .ok_or_else(|| ChainError::InvalidKernel("rows are not square".into()))?;
        Self::from_matrix(matrix)
    }

    /// Builds a kernel from exact rational rows; the rationals are kept as a
    /// side channel when every denominator is at most [`MAX_EXACT_DENOMINATOR`].
    pub fn from_exact_rows(rows: &[Vec<Rational>]) -> Result<Self, ChainError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ChainError::InvalidKernel("rows are not square".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            let sum: Rational = row.iter().copied().sum();
            if sum != Rational::from_integer(1) {
                return Err(ChainError::InvalidKernel(format!(
                    "row {i} sums to {sum} exactly, expected 1"
                )));
            }
        }
        let float_rows: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.iter().map(|q| ratio_to_real(*q)).collect())
            .collect();
        let mut k = Self::from_rows(&float_rows)?;
        if rows
            .iter()
            .flatten()
            .all(|q| *q.denom() <= MAX_EXACT_DENOMINATOR)
        {
            k.exact = Some(rows.iter().flatten().copied().collect());
        }
        Ok(k)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ChainError> {
        if labels.len() != self.n() {
            return Err(ChainError::InvalidParameters(format!(
                "{} labels for {} states",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Attaches an exactly verified stationary distribution.
    pub(crate) fn with_exact_stationary(mut self, pi: Vec<Rational>) -> Result<Self, ChainError> {
        if let Some(exact) = &self.exact {
            let n = self.n();
            for y in 0..n {
                let flow: Rational = (0..n).map(|x| pi[x] * exact[x * n + y]).sum();
                if flow != pi[y] {
                    return Err(ChainError::InvalidDistribution(format!(
                        "claimed stationary weight at {y} is not invariant"
                    )));
                }
            }
        }
        self.exact_stationary = Some(pi);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.matrix.dim()
    }

    pub fn p(&self, x: usize, y: usize) -> T {
        self.matrix[(x, y)]
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.matrix
    }

    pub fn row(&self, x: usize) -> &[T] {
        self.matrix.row(x)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    /// Holding probability at least one half everywhere.
    pub fn is_lazy(&self) -> bool {
        let half = T::lit(0.5) - T::tol(1e-12);
        (0..self.n()).all(|x| self.p(x, x) >= half)
    }

    /// Exact transition values, row-major, when the constructor had them.
    pub fn exact_transitions(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn exact_stationary(&self) -> Option<&[Rational]> {
        self.exact_stationary.as_deref()
    }

    /// States reachable in one step from `x`.
    pub fn successors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(x)
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > T::zero())
            .map(|(y, _)| y)
    }

    /// Whether the matrix is circulant (each row a cyclic shift of row 0).
    pub fn is_circulant(&self, tol: T) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| (self.p(i, j) - self.p(0, (j + n - i) % n)).abs() <= tol))
    }

    /// Stable 64-bit fingerprint of the transition entries.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n().hash(&mut h);
        for p in self.matrix.as_slice() {
            p.as_f64().to_bits().hash(&mut h);
        }
        h.finish()
    }

    pub(crate) fn set_exact(&mut self, exact: Option<Vec<Rational>>) {
        self.exact = exact.filter(|v| v.iter().all(|q| *q.denom() <= MAX_EXACT_DENOMINATOR));
    }
}

fn support<T: Real>(m: &SquareMatrix<T>) -> Vec<Vec<usize>> {
    m.rows()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, p)| **p > T::zero())
                .map(|(y, _)| y)
                .collect()
        })
        .collect()
}

pub(crate) fn ratio_to_real<T: Real>(q: Rational) -> T {
    if q.is_zero() {
        return T::zero();
    }
    T::lit(q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN))
}
