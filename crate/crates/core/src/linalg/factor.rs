//! Factorizations derived from the Hermitian eigendecomposition, plus small
//! orthonormalization utilities.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::eigen::{eigh, eigh_values};
use crate::linalg::{dot, norm, CMatrix};
use crate::scalar::Scalar;

/// Apply a real function to the spectrum of a Hermitian matrix:
/// `U diag(f(lambda)) Uᴴ`.
pub fn hermitian_map<T: Scalar>(a: &CMatrix<T>, f: impl Fn(T) -> T) -> Result<CMatrix<T>> {
    let eig = eigh(a)?;
    let n = a.rows();
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        let fj = f(eig.values[j]);
        for r in 0..n {
            scaled[(r, j)] = scaled[(r, j)].scale(fj);
        }
    }
    Ok(scaled.mul(&eig.vectors.adjoint()).hermitize())
}

/// Hermitian square root of a positive semidefinite matrix. Small negative
/// eigenvalues from round-off are clamped to zero.
pub fn hermitian_sqrt_psd<T: Scalar>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    hermitian_sqrt_with_cutoff(a, T::zero())
}

/// Hermitian square root that zeroes every eigenvalue at or below `cutoff`.
/// Round-off-sized positive eigenvalues of a numerically singular matrix
/// would otherwise contribute sqrt-of-tiny (~1e-8) garbage directions.
pub fn hermitian_sqrt_with_cutoff<T: Scalar>(a: &CMatrix<T>, cutoff: T) -> Result<CMatrix<T>> {
    hermitian_map(a, |l| if l > cutoff { l.sqrt() } else { T::zero() })
}

/// Moore-Penrose pseudoinverse of a Hermitian matrix with an absolute
/// eigenvalue cutoff.
pub fn hermitian_pinv<T: Scalar>(a: &CMatrix<T>, cutoff: T) -> Result<CMatrix<T>> {
    hermitian_map(a, |l| {
        if l.abs() > cutoff {
            T::one() / l
        } else {
            T::zero()
        }
    })
}

/// Spectral norm of an arbitrary (possibly rectangular) matrix, as the square
/// root of the largest eigenvalue of `AᴴA`.
pub fn operator_norm<T: Scalar>(a: &CMatrix<T>) -> Result<T> {
    let gram = a.adjoint_mul(a).hermitize();
    let vals = eigh_values(&gram)?;
    let top = vals.last().copied().unwrap_or(T::zero());
    Ok(top.max(T::zero()).sqrt())
}

/// Orthonormalize the columns in place with two rounds of modified
/// Gram-Schmidt. Fails if a column becomes numerically zero.
pub fn orthonormalize_columns<T: Scalar>(m: &mut CMatrix<T>) -> Result<()> {
    let (rows, cols) = (m.rows(), m.cols());
    for _round in 0..2 {
        for j in 0..cols {
            let mut col = m.column(j);
            for i in 0..j {
                let prev = m.column(i);
                let overlap = dot(&prev, &col);
                for r in 0..rows {
                    col[r] -= prev[r] * overlap;
                }
            }
            let nrm = norm(&col);
            if nrm < T::epsilon().sqrt() * T::epsilon().sqrt() {
                return Err(Error::Internal(format!(
                    "column {j} vanished during orthonormalization"
                )));
            }
            let inv = T::one() / nrm;
            for z in col.iter_mut() {
                *z = z.scale(inv);
            }
            m.set_column(j, &col);
        }
    }
    Ok(())
}

/// Extend a set of orthonormal columns (n x k) to `total` orthonormal
/// columns (k <= total <= n) by appending orthogonalized canonical basis
/// vectors, greedily picking the candidate with the largest residual.
pub fn complete_orthonormal_columns<T: Scalar>(
    partial: &CMatrix<T>,
    total: usize,
) -> Result<CMatrix<T>> {
    let n = partial.rows();
    let k = partial.cols();
    assert!(k <= total && total <= n);
    let mut cols: Vec<Vec<Complex<T>>> = (0..k).map(|j| partial.column(j)).collect();
    while cols.len() < total {
        let mut best: Option<(T, Vec<Complex<T>>)> = None;
        for canonical in 0..n {
            let mut cand = vec![Complex::new(T::zero(), T::zero()); n];
            cand[canonical] = Complex::new(T::one(), T::zero());
            for _ in 0..2 {
                for col in cols.iter() {
                    let overlap = dot(col, &cand);
                    for r in 0..n {
                        cand[r] -= col[r] * overlap;
                    }
                }
            }
            let nrm = norm(&cand);
            if best.as_ref().map_or(true, |(b, _)| nrm > *b) {
                best = Some((nrm, cand));
            }
        }
        match best {
            Some((nrm, mut v)) if nrm > T::epsilon().sqrt() => {
                let inv = T::one() / nrm;
                for z in v.iter_mut() {
                    *z = z.scale(inv);
                }
                cols.push(v);
            }
            _ => {
                return Err(Error::Internal(
                    "could not complete orthonormal basis".to_string(),
                ))
            }
        }
    }
    Ok(CMatrix::from_columns(n, &cols))
}

/// Extend a set of orthonormal columns to a full n x n unitary.
pub fn complete_orthonormal_basis<T: Scalar>(partial: &CMatrix<T>) -> Result<CMatrix<T>> {
    complete_orthonormal_columns(partial, partial.rows())
}

/// Orthonormal polar-type factor of `m` (n x d, n >= d): a matrix `p` with
/// orthonormal columns such that `m = p * sqrt(gram)`, where `gram = mᴴ m`
/// is supplied by the caller (often known in a cleaner algebraic form).
/// Columns belonging to vanishing singular values are free and get filled by
/// orthonormal completion.
pub fn polar_orthonormal_factor<T: Scalar>(
    m: &CMatrix<T>,
    gram: &CMatrix<T>,
) -> Result<CMatrix<T>> {
    let n = m.rows();
    let d = m.cols();
    if gram.rows() != d || n < d {
        return Err(Error::Precondition(
            "polar factor needs gram of matching size and n >= d".into(),
        ));
    }
    let eig = eigh(gram)?;
    let top = eig.values.last().copied().unwrap_or(T::zero()).max(T::zero());
    let cut = T::real(1e-12) * top.max(T::one());
    let mut kept_cols: Vec<Vec<Complex<T>>> = Vec::new();
    let mut kept_idx: Vec<usize> = Vec::new();
    for i in 0..d {
        if eig.values[i] > cut {
            let u = m.mul_vec(&eig.vectors.column(i));
            let nrm = norm(&u);
            if nrm > T::zero() {
                kept_cols.push(u.iter().map(|z| z.unscale(nrm)).collect());
                kept_idx.push(i);
            }
        }
    }
    let rank = kept_cols.len();
    let partial = if rank == 0 {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(n, &kept_cols)
    };
    let completed = complete_orthonormal_columns(&partial, d)?;
    // Scatter back so that column i of the result matches eigenvector i.
    let mut by_eigen = CMatrix::zeros(n, d);
    let mut used = vec![false; d];
    for (slot, &i) in kept_idx.iter().enumerate() {
        by_eigen.set_column(i, &completed.column(slot));
        used[i] = true;
    }
    let mut spare = rank;
    for i in 0..d {
        if !used[i] {
            by_eigen.set_column(i, &completed.column(spare));
            spare += 1;
        }
    }
    Ok(by_eigen.mul(&eig.vectors.adjoint()))
}

/// Orthogonal projector onto the span of the (orthonormal) columns: `B Bᴴ`.
pub fn projector_from_columns<T: Scalar>(b: &CMatrix<T>) -> CMatrix<T> {
    b.mul(&b.adjoint()).hermitize()
}

/// Cholesky factorization `A = L Lᴴ` of a Hermitian positive definite matrix.
pub fn cholesky<T: Scalar>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !a.is_square() {
        return Err(Error::Precondition("cholesky: square matrix required".into()));
    }
    let n = a.rows();
    let mut l = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                let diag = sum.re;
                if diag <= T::zero() {
                    return Err(Error::Precondition(format!(
                        "cholesky: matrix not positive definite at pivot {i}"
                    )));
                }
                l[(i, j)] = Complex::new(diag.sqrt(), T::zero());
            } else {
                l[(i, j)] = sum.unscale(l[(j, j)].re);
            }
        }
    }
    Ok(l)
}

/// Solve `L x = b` for lower-triangular `L`.
pub fn solve_lower_triangular<T: Scalar>(
    l: &CMatrix<T>,
    b: &[Complex<T>],
) -> Vec<Complex<T>> {
    let n = l.rows();
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = l[(i, k)];
            let xk = x[k];
            x[i] -= lik * xk;
        }
        x[i] = x[i].unscale(l[(i, i)].re);
    }
    x
}
