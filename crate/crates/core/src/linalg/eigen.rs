//! Hermitian eigensolvers.
//!
//! The production path [`eigh`] reduces the matrix to real symmetric
//! tridiagonal form with Householder reflections, then runs implicit-shift QL
//! with eigenvector accumulation. [`jacobi_eigh`] is an independent one-sided
//! Jacobi implementation kept as a cross-check oracle; it is slower but has
//! no shared code with the production path.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Scalar;

/// Eigendecomposition of a Hermitian matrix: `a = vectors * diag(values) * vectorsᴴ`,
/// eigenvalues ascending, eigenvector columns orthonormal.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

const MAX_QL_ITERS: usize = 50;

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. Returns `(diag, subdiag, transform)`; `transform` is the unitary `Z`
/// with `Zᴴ A Z` tridiagonal (only when `want_vectors`).
fn tridiagonalize<T: Scalar>(
    a: &CMatrix<T>,
    want_vectors: bool,
) -> (Vec<T>, Vec<T>, Option<Vec<Complex<T>>>) {
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let mut work = a.clone();
    // Column-major accumulation buffer for the unitary transform.
    let mut q: Option<Vec<Complex<T>>> = want_vectors.then(|| {
        let mut q = vec![zero; n * n];
        for i in 0..n {
            q[i * n + i] = Complex::new(T::one(), T::zero());
        }
        q
    });

    let mut v = vec![zero; n];
    let mut u = vec![zero; n];
    let tiny = T::min_positive_value().sqrt();

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // size of the trailing block
        let xnorm_sq = (k + 1..n)
            .map(|i| work[(i, k)].norm_sqr())
            .fold(T::zero(), |acc, x| acc + x);
        let xnorm = xnorm_sq.sqrt();
        if xnorm <= tiny {
            work[(k + 1, k)] = zero;
            work[(k, k + 1)] = zero;
            continue;
        }
        let x0 = work[(k + 1, k)];
        let phase = if x0.norm() > T::zero() {
            x0.unscale(x0.norm())
        } else {
            Complex::new(T::one(), T::zero())
        };
        let beta = -phase.scale(xnorm);

        // Householder vector v = x - beta*e1, normalized.
        for i in 0..m {
            v[i] = work[(k + 1 + i, k)];
        }
        v[0] -= beta;
        let vnorm = v[..m]
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt();
        if vnorm <= tiny * xnorm {
            // Column already in the desired form.
            work[(k + 1, k)] = beta;
            work[(k, k + 1)] = beta.conj();
            continue;
        }
        let inv = T::one() / vnorm;
        for vi in v[..m].iter_mut() {
            *vi = vi.scale(inv);
        }

        // u = B v over the trailing block B = work[k+1.., k+1..].
        for ui in u[..m].iter_mut() {
            *ui = zero;
        }
        for i in 0..m {
            let row = &work.row(k + 1 + i)[k + 1..];
            let mut acc = zero;
            for (bij, vj) in row.iter().zip(v[..m].iter()) {
                acc += *bij * *vj;
            }
            u[i] = acc;
        }
        // s = v† u (real for Hermitian B), w = 2u - 2s v.
        let mut s = T::zero();
        for i in 0..m {
            s += (v[i].conj() * u[i]).re;
        }
        let two = T::real(2.0);
        for i in 0..m {
            u[i] = u[i].scale(two) - v[i].scale(two * s); // u now holds w
        }
        // B -= v w† + w v†
        for i in 0..m {
            let vi = v[i];
            let wi = u[i];
            let row = &mut work.row_mut(k + 1 + i)[k + 1..];
            for j in 0..m {
                row[j] = row[j] - vi * u[j].conj() - wi * v[j].conj();
            }
        }
        // Column k now reduces to beta.
        work[(k + 1, k)] = beta;
        work[(k, k + 1)] = beta.conj();
        for i in k + 2..n {
            work[(i, k)] = zero;
            work[(k, i)] = zero;
        }

        // Accumulate Q <- Q (I - 2 v v†) on the trailing columns.
        if let Some(q) = q.as_mut() {
            // Column-major: column j of Q is q[j*n..(j+1)*n].
            // m_i = sum_j Q[i, k+1+j] v[j]; Q[i, k+1+j] -= 2 m_i conj(v[j]).
            // Work column-by-column to stay contiguous: accumulate m into a
            // scratch vector first.
            let mut mvec = vec![zero; n];
            for j in 0..m {
                let col = &q[(k + 1 + j) * n..(k + 2 + j) * n];
                let vj = v[j];
                for (mi, qij) in mvec.iter_mut().zip(col.iter()) {
                    *mi += *qij * vj;
                }
            }
            for j in 0..m {
                let col = &mut q[(k + 1 + j) * n..(k + 2 + j) * n];
                let cvj = v[j].conj().scale(two);
                for (qij, mi) in col.iter_mut().zip(mvec.iter()) {
                    *qij -= *mi * cvj;
                }
            }
        }
    }

    // Extract real diagonal and fold subdiagonal phases into the transform.
    let mut diag = vec![T::zero(); n];
    let mut sub = vec![T::zero(); n];
    for i in 0..n {
        diag[i] = work[(i, i)].re;
    }
    let mut ph = Complex::new(T::one(), T::zero());
    let mut phases = vec![Complex::new(T::one(), T::zero()); n];
    for k in 0..n.saturating_sub(1) {
        let t = work[(k + 1, k)];
        let mag = t.norm();
        sub[k] = mag;
        if mag > T::zero() {
            ph = ph * t.unscale(mag);
        }
        phases[k + 1] = ph;
    }
    if let Some(q) = q.as_mut() {
        for (j, phj) in phases.iter().enumerate() {
            for z in q[j * n..(j + 1) * n].iter_mut() {
                *z = *z * *phj;
            }
        }
    }
    (diag, sub, q)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix, optionally
/// accumulating rotations into complex column-major `z`.
fn tridiagonal_ql<T: Scalar>(
    d: &mut [T],
    e: &mut [T],
    mut z: Option<(&mut [Complex<T>], usize)>,
) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = T::epsilon();
    // Absolute deflation floor at the backward-error level of the reduction.
    // A purely relative test stalls on clusters of near-zero eigenvalues,
    // whose local scale can sit far below eps * ||T||.
    let anorm = d
        .iter()
        .map(|v| v.abs())
        .chain(e.iter().map(|v| v.abs()))
        .fold(T::zero(), |a, b| a.max(b));
    let floor = (eps * anorm).max(T::min_positive_value());
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                let thresh = (eps * dd).max(floor);
                if e[m].abs() <= thresh {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERS {
                return Err(Error::NoConvergence(MAX_QL_ITERS));
            }
            let two = T::real(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some((z, rows)) = z.as_mut() {
                    let rows = *rows;
                    let (lo, hi) = z.split_at_mut((i + 1) * rows);
                    let zi = &mut lo[i * rows..];
                    let zi1 = &mut hi[..rows];
                    for (a, bb) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let are = a.re;
                        let aim = a.im;
                        let bre = bb.re;
                        let bim = bb.im;
                        bb.re = s * are + c * bre;
                        bb.im = s * aim + c * bim;
                        a.re = c * are - s * bre;
                        a.im = c * aim - s * bim;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

fn check_hermitian<T: Scalar>(a: &CMatrix<T>, label: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Precondition(format!(
            "{label}: expected square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let tol = T::real(1e-12);
    if !a.is_hermitian(tol) {
        return Err(Error::NotHermitian {
            label: label.to_string(),
            deviation: a.hermiticity_deviation().to_f64(),
        });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh<T: Scalar>(a: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    check_hermitian(a, "eigh input")?;
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let (mut d, mut e, q) = tridiagonalize(a, true);
    let mut z = q.expect("vectors requested");
    tridiagonal_ql(&mut d, &mut e, Some((&mut z[..], n)))?;

    // Sort ascending, permuting columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("non-NaN eigenvalues"));
    let values: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| z[order[c] * n + r]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigh_values<T: Scalar>(a: &CMatrix<T>) -> Result<Vec<T>> {
    check_hermitian(a, "eigh input")?;
    let (mut d, mut e, _) = tridiagonalize(a, false);
    tridiagonal_ql::<T>(&mut d, &mut e, None)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("non-NaN eigenvalues"));
    Ok(d)
}

/// Spectral norm of a Hermitian matrix: `max |eigenvalue|`.
pub fn spectral_norm_hermitian<T: Scalar>(a: &CMatrix<T>) -> Result<T> {
    let vals = eigh_values(a)?;
    Ok(vals
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |acc, x| acc.max(x)))
}

/// Cyclic Jacobi eigendecomposition. Independent of [`eigh`]; used as a
/// cross-check oracle in tests and kept accurate rather than fast.
pub fn jacobi_eigh<T: Scalar>(a: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    check_hermitian(a, "jacobi input")?;
    let n = a.rows();
    let mut work = a.hermitize();
    let mut vecs = CMatrix::identity(n);
    let fro = work.frobenius_norm();
    if n <= 1 || fro == T::zero() {
        let values = (0..n).map(|i| work[(i, i)].re).collect();
        return Ok(HermitianEigen {
            values,
            vectors: vecs,
        });
    }
    let target = fro * T::epsilon() * T::real(0.5);
    let max_sweeps = 60;
    for _sweep in 0..max_sweeps {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + work[(p, q)].norm_sqr();
            }
        }
        let off = (off + off).sqrt();
        if off <= target {
            let mut order: Vec<usize> = (0..n).collect();
            let d: Vec<T> = (0..n).map(|i| work[(i, i)].re).collect();
            order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("non-NaN"));
            let values: Vec<T> = order.iter().map(|&i| d[i]).collect();
            let vectors = CMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
            return Ok(HermitianEigen { values, vectors });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = work[(p, q)];
                let beta = apq.norm();
                if beta == T::zero() {
                    continue;
                }
                let u = apq.unscale(beta); // phase of the off-diagonal entry
                let app = work[(p, p)].re;
                let aqq = work[(q, q)].re;
                let tau = (aqq - app) / (beta + beta);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // G: [[c, s*conj(u)^†...]] realized through the update rules below;
                // derived from diagonalizing the phase-rotated 2x2 block.
                let cu = u.conj();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = work[(k, p)];
                    let akq = work[(k, q)];
                    let new_kp = akp.scale(c) - (cu * akq).scale(s);
                    let new_kq = akp.scale(s) + (cu * akq).scale(c);
                    work[(k, p)] = new_kp;
                    work[(k, q)] = new_kq;
                    work[(p, k)] = new_kp.conj();
                    work[(q, k)] = new_kq.conj();
                }
                work[(p, p)] = Complex::new(app - t * beta, T::zero());
                work[(q, q)] = Complex::new(aqq + t * beta, T::zero());
                work[(p, q)] = Complex::new(T::zero(), T::zero());
                work[(q, p)] = Complex::new(T::zero(), T::zero());
                for k in 0..n {
                    let vkp = vecs[(k, p)];
                    let vkq = vecs[(k, q)];
                    vecs[(k, p)] = vkp.scale(c) - (cu * vkq).scale(s);
                    vecs[(k, q)] = vkp.scale(s) + (cu * vkq).scale(c);
                }
            }
        }
    }
    Err(Error::NoConvergence(max_sweeps))
}
