//! Dense complex linear algebra for small Hermitian problems.
//!
//! Everything here targets matrices of dimension <= ~25 (two-photon OAM
//! subspaces), so cyclic Jacobi rotations and straightforward elimination
//! are both robust and fast enough. Matrices are row-major `Vec<Complex64>`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn idx(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

pub fn identity(n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[idx(n, i, i)] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(n: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[idx(n, i, k)];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                c[idx(n, i, j)] += aik * b[idx(n, k, j)];
            }
        }
    }
    c
}

pub fn adjoint(n: usize, a: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            c[idx(n, j, i)] = a[idx(n, i, j)].conj();
        }
    }
    c
}

pub fn trace(n: usize, a: &[Complex64]) -> Complex64 {
    (0..n).map(|i| a[idx(n, i, i)]).sum()
}

/// Largest elementwise deviation from Hermitian symmetry.
pub fn hermiticity_deviation(n: usize, a: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[idx(n, i, j)] - a[idx(n, j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns of a row-major matrix, so that
/// `A = V diag(λ) V†` within ~1e-12 of the input scale.
pub fn hermitian_eig(n: usize, a: &[Complex64]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    assert_eq!(a.len(), n * n, "matrix shape mismatch");
    let dev = hermiticity_deviation(n, a);
    let scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1e-300);
    if dev > 1e-10 * scale.max(1.0) {
        return Err(Error::NotHermitian { deviation: dev, tol: 1e-10 * scale.max(1.0) });
    }

    let mut m = a.to_vec();
    // Symmetrize exactly so rotations keep the Hermitian structure.
    for i in 0..n {
        m[idx(n, i, i)] = Complex64::new(m[idx(n, i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = 0.5 * (m[idx(n, i, j)] + m[idx(n, j, i)].conj());
            m[idx(n, i, j)] = avg;
            m[idx(n, j, i)] = avg.conj();
        }
    }
    let mut v = identity(n);

    let frob: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-14 * frob;

    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += 2.0 * m[idx(n, i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[idx(n, p, q)];
                if apq.norm() <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / apq.norm(); // e^{iφ}
                let app = m[idx(n, p, p)].re;
                let aqq = m[idx(n, q, q)].re;
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // U restricted to (p, q):  [ c        s        ]
                //                          [ -s e^{-iφ}  c e^{-iφ} ]
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = -s * phase.conj();
                let uqq = c * phase.conj();

                // columns:  M <- M U
                for i in 0..n {
                    let mip = m[idx(n, i, p)];
                    let miq = m[idx(n, i, q)];
                    m[idx(n, i, p)] = mip * upp + miq * uqp;
                    m[idx(n, i, q)] = mip * upq + miq * uqq;
                }
                // rows:  M <- U† M
                for j in 0..n {
                    let mpj = m[idx(n, p, j)];
                    let mqj = m[idx(n, q, j)];
                    m[idx(n, p, j)] = upp.conj() * mpj + uqp.conj() * mqj;
                    m[idx(n, q, j)] = upq.conj() * mpj + uqq.conj() * mqj;
                }
                // eigenvectors:  V <- V U
                for i in 0..n {
                    let vip = v[idx(n, i, p)];
                    let viq = v[idx(n, i, q)];
                    v[idx(n, i, p)] = vip * upp + viq * uqp;
                    v[idx(n, i, q)] = vip * upq + viq * uqq;
                }
                m[idx(n, p, q)] = Complex64::new(0.0, 0.0);
                m[idx(n, q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| m[idx(n, i, i)].re).collect();
    order.sort_by(|&i, &j| evals[j].total_cmp(&evals[i]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut sorted_vecs = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            sorted_vecs[idx(n, i, new_col)] = v[idx(n, i, old_col)];
        }
    }
    Ok((sorted_vals, sorted_vecs))
}

/// Apply a real function to the eigenvalues of a Hermitian matrix:
/// f(A) = V diag(f(λ)) V†.
pub fn hermitian_function(
    n: usize,
    a: &[Complex64],
    f: impl Fn(f64) -> f64,
) -> Result<Vec<Complex64>> {
    let (vals, vecs) = hermitian_eig(n, a)?;
    let mut scaled = vec![Complex64::new(0.0, 0.0); n * n];
    for (k, &lambda) in vals.iter().enumerate() {
        let fv = f(lambda);
        if fv == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vecs[idx(n, i, k)];
            for j in 0..n {
                scaled[idx(n, i, j)] += fv * vik * vecs[idx(n, j, k)].conj();
            }
        }
    }
    Ok(scaled)
}

/// Square root of a positive-semidefinite Hermitian matrix; eigenvalues in
/// [-clamp_tol, 0) are clamped to zero, anything lower is a domain error.
///
/// Eigenvalues below 1e-13 of the largest are treated as exact zeros: the
/// eigensolver's absolute noise there would otherwise inject O(√ε) garbage
/// into the root.
pub fn sqrt_psd(n: usize, a: &[Complex64], clamp_tol: f64) -> Result<Vec<Complex64>> {
    let (vals, _) = hermitian_eig(n, a)?;
    if let Some(bad) = vals.iter().find(|&&v| v < -clamp_tol) {
        return Err(Error::domain(format!(
            "matrix is not PSD: eigenvalue {bad:e} below -{clamp_tol:e}"
        )));
    }
    let floor = 1e-13 * vals.first().copied().unwrap_or(0.0).max(0.0);
    hermitian_function(n, a, |x| if x > floor { x.sqrt() } else { 0.0 })
}

/// Trace of the PSD square root, Σ √λ, with the same relative noise floor
/// as [`sqrt_psd`].
pub fn trace_sqrt_psd(n: usize, a: &[Complex64]) -> Result<f64> {
    let (vals, _) = hermitian_eig(n, a)?;
    let floor = 1e-13 * vals.first().copied().unwrap_or(0.0).max(0.0);
    Ok(vals.iter().filter(|&&v| v > floor).map(|v| v.sqrt()).sum())
}

/// Lower-triangular Cholesky factor L with A = L L†.
///
/// Meant for strictly positive-definite input (add a small ridge first when
/// factoring a reconstruction seed).
pub fn cholesky(n: usize, a: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[idx(n, i, j)];
            for k in 0..j {
                sum -= l[idx(n, i, k)] * l[idx(n, j, k)].conj();
            }
            if i == j {
                if sum.re <= 0.0 {
                    return Err(Error::domain(format!(
                        "Cholesky pivot {i} is non-positive ({:e})",
                        sum.re
                    )));
                }
                l[idx(n, i, i)] = Complex64::new(sum.re.sqrt(), 0.0);
            } else {
                l[idx(n, i, j)] = sum / l[idx(n, j, j)];
            }
        }
    }
    Ok(l)
}

/// Solve the real linear system A x = b by Gaussian elimination with
/// partial pivoting. A is row-major n×n and is consumed.
pub fn solve_real(n: usize, a: &mut [f64], b: &mut [f64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot_row = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot_row = row;
            }
        }
        if best < 1e-12 {
            return Err(Error::SingularDesign(format!("pivot {col} is {best:e}")));
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}
