//! Deterministic generators and independent oracles used by the test suites.
//!
//! The oracles here intentionally avoid the production code paths: the
//! generalized eigenvalue oracle goes through a Cholesky reduction rather
//! than canonical orthogonalization, and the norm oracle is plain power
//! iteration.

use num_complex::Complex;

use crate::error::Result;
use crate::linalg::{cholesky, eigh_values, norm, solve_lower_triangular, CMatrix};
use crate::operators::StateVector;
use crate::scalar::Scalar;

/// Minimal splitmix64 stream for reproducible test data.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [-0.5, 0.5).
    pub fn next_centered(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian<T: Scalar>(n: usize, seed: u64) -> CMatrix<T> {
    let mut rng = SplitMix64::new(seed);
    let raw = CMatrix::from_fn(n, n, |_, _| {
        Complex::new(T::real(rng.next_centered()), T::real(rng.next_centered()))
    });
    raw.add(&raw.adjoint()).scale(T::real(0.5)).hermitize()
}

/// Random complex vector with entries of order one.
pub fn random_vector<T: Scalar>(n: usize, seed: u64) -> Vec<Complex<T>> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| Complex::new(T::real(rng.next_centered()), T::real(rng.next_centered())))
        .collect()
}

/// Random normalized state.
pub fn random_state<T: Scalar>(dim: usize, seed: u64) -> StateVector<T> {
    let mut v = random_vector::<T>(dim, seed);
    let nrm = norm(&v);
    for z in v.iter_mut() {
        *z = z.unscale(nrm);
    }
    StateVector::new(v).expect("normalized by construction")
}

/// Spectral-norm oracle for Hermitian matrices: power iteration on a seeded
/// start vector, returning `max |eigenvalue|`.
pub fn power_iteration_norm<T: Scalar>(a: &CMatrix<T>, seed: u64) -> T {
    let n = a.rows();
    if n == 0 {
        return T::zero();
    }
    let mut v = random_vector::<T>(n, seed);
    let nrm = norm(&v);
    for z in v.iter_mut() {
        *z = z.unscale(nrm);
    }
    let mut last = T::zero();
    for _ in 0..200_000 {
        let w = a.mul_vec(&v);
        let growth = norm(&w);
        if growth == T::zero() {
            return T::zero();
        }
        if (growth - last).abs() <= T::real(1e-14) * growth.max(T::one()) {
            return growth;
        }
        last = growth;
        v = w.iter().map(|z| z.unscale(growth)).collect();
    }
    last
}

/// Generalized eigenvalue oracle for a Hermitian pair `(H, S)` with `S`
/// positive definite, via the Cholesky reduction `L^-1 H L^-H`.
pub fn generalized_eigen_cholesky<T: Scalar>(
    h: &CMatrix<T>,
    s: &CMatrix<T>,
) -> Result<Vec<T>> {
    let n = h.rows();
    let l = cholesky(s)?;
    // Y = L^-1 H, column by column.
    let mut y = CMatrix::zeros(n, n);
    for c in 0..n {
        let col = solve_lower_triangular(&l, &h.column(c));
        y.set_column(c, &col);
    }
    // A = Y L^-H  =>  A^H = L^-1 Y^H.
    let yh = y.adjoint();
    let mut ah = CMatrix::zeros(n, n);
    for c in 0..n {
        let col = solve_lower_triangular(&l, &yh.column(c));
        ah.set_column(c, &col);
    }
    eigh_values(&ah.adjoint().hermitize())
}
