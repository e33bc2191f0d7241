//! Dense eigenvalue routines: balancing, Hessenberg reduction and the
//! implicitly double-shifted QR iteration for real nonsymmetric matrices,
//! plus cyclic Jacobi for real symmetric matrices.

use num_complex::Complex;

use crate::matrix::SquareMatrix;
use crate::scalar::Real;

/// Outcome of the nonsymmetric solver; `converged == false` means the sweep
/// budget ran out and `eigenvalues` holds only the deflated part.
#[derive(Debug, Clone)]
pub(crate) struct QrOutcome<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub residual: T,
    pub converged: bool,
    pub sweeps: usize,
}

/// Eigenvalues of a real square matrix.
pub(crate) fn real_eigenvalues<T: Real>(m: &SquareMatrix<T>) -> QrOutcome<T> {
    let mut a = m.clone();
    let scale = m.frobenius_norm();
    balance(&mut a);
    hessenberg(&mut a);
    let mut out = hqr(&mut a, 100 * m.dim().max(1));
    if scale > T::zero() {
        out.residual = out.residual / scale;
    }
    out
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
pub(crate) fn balance<T: Real>(a: &mut SquareMatrix<T>) {
    let n = a.dim();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c = c + a[(j, i)].abs();
                    r = r + a[(i, j)].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / radix;
            while c < g {
                f = f * radix;
                c = c * sqrdx;
            }
            g = r * radix;
            while c > g {
                f = f / radix;
                c = c / sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let ginv = T::one() / f;
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] * ginv;
                }
                for j in 0..n {
                    a[(j, i)] = a[(j, i)] * f;
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transformations; entries below the subdiagonal are zeroed on exit.
pub(crate) fn hessenberg<T: Real>(a: &mut SquareMatrix<T>) {
    let n = a.dim();
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut piv = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..n {
                let tmp = a[(piv, j)];
                a[(piv, j)] = a[(m, j)];
                a[(m, j)] = tmp;
            }
            for j in 0..n {
                let tmp = a[(j, piv)];
                a[(j, piv)] = a[(j, m)];
                a[(j, m)] = tmp;
            }
        }
        if x != T::zero() {
            for i in (m + 1)..n {
                let mut y = a[(i, m - 1)];
                if y != T::zero() {
                    y = y / x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        a[(i, j)] = a[(i, j)] - y * a[(m, j)];
                    }
                    for j in 0..n {
                        a[(j, m)] = a[(j, m)] + y * a[(j, i)];
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = T::zero();
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
///
/// A subdiagonal entry is deflated once it is at most
/// `1e-14 * (|h_ii| + |h_{i+1,i+1}|)`.
pub(crate) fn hqr<T: Real>(a: &mut SquareMatrix<T>, max_sweeps: usize) -> QrOutcome<T> {
    let n = a.dim();
    let deflate = T::lit(1e-14).max(T::epsilon());
    let mut eig: Vec<Complex<T>> = Vec::with_capacity(n);
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + a[(i, j)].abs();
        }
    }
    let mut residual = T::zero();
    let mut sweeps = 0usize;
    let mut t = T::zero();
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let nu = nn as usize;
        let mut its = 0usize;
        loop {
            let mut l = nu;
            while l >= 1 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= deflate * s {
                    residual = residual.max(a[(l, l - 1)].abs());
                    a[(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                eig.push(Complex::new(x + t, T::zero()));
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = T::lit(0.5) * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x = x + t;
                if q >= T::zero() {
                    let z = p + sign(z, p);
                    let hi = x + z;
                    let lo = if z != T::zero() { x - w / z } else { hi };
                    eig.push(Complex::new(hi, T::zero()));
                    eig.push(Complex::new(lo, T::zero()));
                } else {
                    eig.push(Complex::new(x + p, z));
                    eig.push(Complex::new(x + p, -z));
                }
                nn -= 2;
                break;
            }
            if sweeps >= max_sweeps {
                return QrOutcome {
                    eigenvalues: eig,
                    residual,
                    converged: false,
                    sweeps,
                };
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t = t + x;
                for i in 0..=nu {
                    a[(i, i)] = a[(i, i)] - x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;
            sweeps += 1;

            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= T::epsilon() * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                a[(i, i - 2)] = T::zero();
                if i != m + 2 {
                    a[(i, i - 3)] = T::zero();
                }
            }
            let mut k = m;
            while k < nu {
                let mut xk = T::zero();
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k + 1 != nu {
                        a[(k + 2, k - 1)]
                    } else {
                        T::zero()
                    };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != T::zero() {
                        p = p / xk;
                        q = q / xk;
                        r = r / xk;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * xk;
                    }
                    p = p + s;
                    let xr = p / s;
                    let yr = q / s;
                    let zr = r / s;
                    q = q / p;
                    r = r / p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp = pp + r * a[(k + 2, j)];
                            a[(k + 2, j)] = a[(k + 2, j)] - pp * zr;
                        }
                        a[(k + 1, j)] = a[(k + 1, j)] - pp * yr;
                        a[(k, j)] = a[(k, j)] - pp * xr;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = xr * a[(i, k)] + yr * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp = pp + zr * a[(i, k + 2)];
                            a[(i, k + 2)] = a[(i, k + 2)] - pp * r;
                        }
                        a[(i, k + 1)] = a[(i, k + 1)] - pp * q;
                        a[(i, k)] = a[(i, k)] - pp;
                    }
                }
                k += 1;
            }
        }
    }
    QrOutcome {
        eigenvalues: eig,
        residual,
        converged: true,
        sweeps,
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted in decreasing order.
pub fn symmetric_eigenvalues<T: Real>(m: &SquareMatrix<T>) -> Vec<T> {
    let n = m.dim();
    let mut a = m.clone();
    let scale = m.frobenius_norm().max(T::min_positive_value());
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= T::epsilon() * T::lit(1e-2) * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = sign(T::one(), theta) / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re_im(mut v: Vec<Complex<f64>>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v.into_iter().map(|z| (z.re, z.im)).collect()
    }

    #[test]
    fn triangular_matrix_eigenvalues_are_diagonal() {
        let m = SquareMatrix::from_rows(&[
            vec![3.0, 1.0, 2.0],
            vec![0.0, -1.0, 5.0],
            vec![0.0, 0.0, 0.5],
        ])
        .unwrap();
        let out = real_eigenvalues(&m);
        assert!(out.converged);
        let ev = sorted_re_im(out.eigenvalues);
        for ((re, im), want) in ev.iter().zip([-1.0, 0.5, 3.0]) {
            assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_block_has_complex_pair() {
        let m = SquareMatrix::from_rows(&[vec![0.0, -2.0], vec![2.0, 0.0]]).unwrap();
        let ev = sorted_re_im(real_eigenvalues(&m).eigenvalues);
        assert!((ev[0].1 + 2.0).abs() < 1e-14 && (ev[1].1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let m = SquareMatrix::from_rows(&[
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let ev = sorted_re_im(real_eigenvalues(&m).eigenvalues);
        for ((re, im), want) in ev.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!(
                (re - want).abs() < 1e-9 && im.abs() < 1e-9,
                "{re} vs {want}"
            );
        }
    }

    #[test]
    fn jacobi_on_known_symmetric_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 3 and 1
        let m = SquareMatrix::from_rows(&[vec![2.0f64, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] - 3.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        // path graph adjacency on 4 vertices: 2cos(k pi / 5)
        let p = SquareMatrix::from_fn(4, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 });
        let ev = symmetric_eigenvalues(&p);
        for (k, e) in ev.iter().enumerate() {
            let want = 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 5.0).cos();
            assert!((e - want).abs() < 1e-13);
        }
    }
}
