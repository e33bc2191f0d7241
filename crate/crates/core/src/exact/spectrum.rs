use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::eigen::{real_eigenvalues, symmetric_eigenvalues};
use super::AnalysisError;
use crate::chain::{stationary, transform, StochasticKernel, TransformKind};
use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// Largest kernel handed to the dense QR solver.
pub const MAX_SPECTRUM_STATES: usize = 512;

/// Complex eigenvalues sorted by modulus, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    eigenvalues: Vec<Complex<T>>,
    residual: T,
}

impl<T: Real> Spectrum<T> {
    pub fn new(mut eigenvalues: Vec<Complex<T>>, residual: T) -> Self {
        eigenvalues.sort_by(|a, b| {
            b.norm()
                .partial_cmp(&a.norm())
                .unwrap()
                .then(b.re.partial_cmp(&a.re).unwrap())
                .then(b.im.partial_cmp(&a.im).unwrap())
        });
        Self {
            eigenvalues,
            residual,
        }
    }

    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Backward-error estimate relative to the matrix norm.
    pub fn residual(&self) -> T {
        self.residual
    }

    pub fn moduli(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|z| z.norm()).collect()
    }

    /// Number of eigenvalues within `tol` of `z`.
    pub fn count_near(&self, z: Complex<T>, tol: T) -> usize {
        self.eigenvalues
            .iter()
            .filter(|w| (**w - z).norm() <= tol)
            .count()
    }

    /// The eigenvalues with the one closest to 1 removed.
    pub fn nontrivial(&self) -> Vec<Complex<T>> {
        let one = Complex::new(T::one(), T::zero());
        let trivial = self
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (**a - one).norm().partial_cmp(&(**b - one).norm()).unwrap())
            .map(|(i, _)| i);
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != trivial)
            .map(|(_, z)| *z)
            .collect()
    }

    /// `max_{i != 0} |lambda_i|`.
    pub fn second_modulus(&self) -> T {
        self.nontrivial()
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// `min_{i != 0} (1 - |lambda_i|)`.
    pub fn eigen_gap(&self) -> T {
        T::one() - self.second_modulus()
    }
}

/// Eigenvalues of the transition matrix via balancing, Hessenberg reduction
/// and double-shift QR.
pub fn spectrum<T: Real>(k: &StochasticKernel<T>) -> Result<Spectrum<T>, AnalysisError> {
    matrix_spectrum(k.matrix())
}

pub fn matrix_spectrum<T: Real>(m: &SquareMatrix<T>) -> Result<Spectrum<T>, AnalysisError> {
    let n = m.dim();
    if n > MAX_SPECTRUM_STATES {
        return Err(AnalysisError::StateSpaceTooLarge {
            n,
            limit: MAX_SPECTRUM_STATES,
        });
    }
    let out = real_eigenvalues(m);
    let spec = Spectrum::new(out.eigenvalues, out.residual);
    if out.converged {
        Ok(spec)
    } else {
        Err(AnalysisError::NoConvergence {
            sweeps: out.sweeps,
            partial: spec
                .eigenvalues
                .iter()
                .map(|z| (z.re.as_f64(), z.im.as_f64()))
                .collect(),
        })
    }
}

/// Closed-form spectrum of the circulant matrix with the given first row:
/// `sum_j c_j w^{jk}`, `w = exp(2 pi i / n)`.
pub fn circulant_spectrum<T: Real>(first_row: &[T]) -> Spectrum<T> {
    let n = first_row.len();
    let tau = T::TAU();
    let eig = (0..n)
        .map(|k| {
            first_row
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (j, c)| {
                    // reduce jk mod n before scaling to keep the angle small
                    let angle = tau * T::from_count((j * k) % n) / T::from_count(n);
                    acc + Complex::from_polar(*c, angle)
                })
        })
        .collect();
    Spectrum::new(eig, T::zero())
}

/// Greedy minimal-distance pairing of two spectra; returns the largest
/// modulus difference over matched pairs (infinite on length mismatch).
pub fn max_matched_modulus_error<T: Real>(a: &Spectrum<T>, b: &Spectrum<T>) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.eigenvalues().iter().enumerate() {
        for (j, y) in b.eigenvalues().iter().enumerate() {
            pairs.push(((*x - *y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst = T::zero();
    for (_, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        let err = (a.eigenvalues()[i].norm() - b.eigenvalues()[j].norm()).abs();
        worst = worst.max(err);
    }
    worst
}

/// Spectral gap `1 - lambda_1((P + P*)/2)` from the symmetrized matrix
/// `D^{1/2} ((P + P*)/2) D^{-1/2}` by cyclic Jacobi.
pub fn spectral_gap<T: Real>(k: &StochasticKernel<T>) -> Result<T, AnalysisError> {
    let pi = stationary(k)?;
    let n = k.n();
    // D^{1/2} K D^{-1/2} for K = (P + P*)/2 equals
    // (sqrt(pi_x) P(x,y) / sqrt(pi_y) + sqrt(pi_y) P(y,x) / sqrt(pi_x)) / 2
    let root: Vec<T> = pi.as_slice().iter().map(|w| w.sqrt()).collect();
    let half = T::lit(0.5);
    let s = SquareMatrix::from_fn(n, |x, y| {
        half * (root[x] * k.p(x, y) / root[y] + root[y] * k.p(y, x) / root[x])
    });
    let ev = symmetric_eigenvalues(&s);
    let second = ev.get(1).copied().unwrap_or(T::one());
    Ok((T::one() - second).max(T::zero()).min(T::lit(2.0)))
}

/// Same quantity through the nonsymmetric QR path on `(P + P*)/2`.
pub fn spectral_gap_via_qr<T: Real>(k: &StochasticKernel<T>) -> Result<T, AnalysisError> {
    let sym = transform(k, TransformKind::AdditiveSymmetrize)?;
    let spec = spectrum(&sym)?;
    let top = spec
        .nontrivial()
        .iter()
        .map(|z| z.re)
        .fold(T::neg_infinity(), T::max);
    Ok(T::one() - top)
}
