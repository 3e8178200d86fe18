//! Threshold regularization of the noisy pencil and the reduced generalized
//! eigenvalue solve via canonical orthogonalization.

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix};
use crate::noise::NoisyPencil;
use crate::scalar::Scalar;

/// Threshold floor substituted for noiseless runs, guarding against
/// round-off-negative eigenvalues of the exact overlap matrix.
pub const EPSILON_FLOOR: f64 = 1e-12;

/// The regularized problem after discarding overlap eigenspaces below `epsilon`.
#[derive(Clone, Debug)]
pub struct ThresholdedProblem<T> {
    pub epsilon: T,
    /// `D x K` orthonormal eigenvectors of `S'` with eigenvalue >= epsilon.
    pub kept_basis: CMatrix<T>,
    /// `K x K` projected Hamiltonian matrix.
    pub htil: CMatrix<T>,
    /// `K x K` projected overlap matrix (diagonal in exact arithmetic).
    pub stil: CMatrix<T>,
    pub kept_dim: usize,
}

/// Spectrum of the regularized problem.
#[derive(Clone, Debug)]
pub struct SolveResult<T> {
    /// Lowest regularized eigenvalue.
    pub e0_tilde: T,
    /// All regularized eigenvalues, ascending.
    pub spectrum: Vec<T>,
    pub kept_dim: usize,
    /// Condition number of the projected overlap matrix.
    pub stil_condition: T,
}

/// Eigenvectors of a Hermitian matrix with eigenvalue `>= epsilon` (ties kept).
pub fn threshold<T: Scalar>(sp: &CMatrix<T>, epsilon: T) -> Result<(CMatrix<T>, usize)> {
    if !(epsilon > T::zero()) {
        return Err(Error::Precondition("threshold must be positive".into()));
    }
    let eig = eigh(sp)?;
    let dim = sp.rows();
    let kept: Vec<usize> = (0..dim).filter(|&i| eig.values[i] >= epsilon).collect();
    if kept.is_empty() {
        return Err(Error::AllRemoved {
            epsilon: epsilon.to_f64(),
        });
    }
    let basis = CMatrix::from_fn(dim, kept.len(), |r, c| eig.vectors[(r, kept[c])]);
    let count = kept.len();
    Ok((basis, count))
}

/// Project the noisy pair onto the kept overlap eigenspaces.
pub fn build_thresholded<T: Scalar>(
    noisy: &NoisyPencil<T>,
    epsilon: T,
) -> Result<ThresholdedProblem<T>> {
    let (kept_basis, kept_dim) = threshold(noisy.sp(), epsilon)?;
    let htil = kept_basis
        .adjoint_mul(&noisy.hp().mul(&kept_basis))
        .hermitize();
    let stil = kept_basis
        .adjoint_mul(&noisy.sp().mul(&kept_basis))
        .hermitize();
    Ok(ThresholdedProblem {
        epsilon,
        kept_basis,
        htil,
        stil,
        kept_dim,
    })
}

/// Solve the Hermitian pair `(htil, stil)` with `stil` positive definite by
/// canonical orthogonalization: eigenvalues of `stil^{-1/2} htil stil^{-1/2}`.
pub fn solve_pair<T: Scalar>(htil: &CMatrix<T>, stil: &CMatrix<T>, epsilon: T) -> Result<SolveResult<T>> {
    let k = stil.rows();
    let stil_eig = eigh(stil)?;
    let smin = stil_eig.values[0];
    let smax = stil_eig.values[k - 1];
    if smin < epsilon - T::real(1e-12) * smax.max(T::one()) {
        return Err(Error::Internal(format!(
            "projected overlap eigenvalue {:.3e} fell below the threshold {:.3e}",
            smin.to_f64(),
            epsilon.to_f64()
        )));
    }
    if smin <= T::zero() {
        return Err(Error::Internal(
            "projected overlap matrix is not positive definite".into(),
        ));
    }
    // W = U diag(1/sqrt(lambda)) U^H
    let mut w = stil_eig.vectors.clone();
    for c in 0..k {
        let f = T::one() / stil_eig.values[c].sqrt();
        for r in 0..k {
            w[(r, c)] = w[(r, c)].scale(f);
        }
    }
    let w = w.mul(&stil_eig.vectors.adjoint()).hermitize();
    let reduced = w.adjoint_mul(&htil.mul(&w)).hermitize();
    let spectrum = crate::linalg::eigh_values(&reduced)?;
    Ok(SolveResult {
        e0_tilde: spectrum[0],
        spectrum,
        kept_dim: k,
        stil_condition: smax / smin,
    })
}

/// Threshold the noisy pencil at `epsilon` and solve the reduced problem.
pub fn solve_thresholded<T: Scalar>(noisy: &NoisyPencil<T>, epsilon: T) -> Result<SolveResult<T>> {
    let problem = build_thresholded(noisy, epsilon)?;
    solve_pair(&problem.htil, &problem.stil, epsilon)
}

/// The experiment threshold rule `0.1 * D * sigma`. Returns zero when
/// `sigma` is zero; callers substitute [`EPSILON_FLOOR`].
pub fn epsilon_rule<T: Scalar>(dim: usize, sigma: T) -> T {
    T::real(0.1) * T::real(dim as f64) * sigma
}
