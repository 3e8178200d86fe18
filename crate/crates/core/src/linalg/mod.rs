//! Dense complex matrices and the decompositions the library needs.
//!
//! Everything here is desk scale (dimensions in the low hundreds), dense and
//! row-major. The eigensolvers live in [`eigen`], derived factorizations in
//! [`factor`].

pub mod eigen;
pub mod factor;

use num_complex::Complex;

use crate::scalar::Scalar;

pub use eigen::{eigh, eigh_values, jacobi_eigh, spectral_norm_hermitian, HermitianEigen};
pub use factor::{
    cholesky, complete_orthonormal_basis, complete_orthonormal_columns, hermitian_map,
    hermitian_pinv, hermitian_sqrt_psd, hermitian_sqrt_with_cutoff, operator_norm,
    orthonormalize_columns, polar_orthonormal_factor, projector_from_columns,
    solve_lower_triangular,
};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from a list of columns, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex<T>>]) -> Self {
        let cols = columns.len();
        debug_assert!(columns.iter().all(|c| c.len() == rows));
        Self::from_fn(rows, cols, |r, c| columns[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Complex<T>] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[Complex<T>]) {
        debug_assert_eq!(v.len(), self.rows);
        for r in 0..self.rows {
            self[(r, c)] = v[r];
        }
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        // i-k-j order streams rows of `other` and `out`.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += a * *s;
                }
            }
        }
        out
    }

    /// `selfᴴ * other` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_mul shape mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let arow = self.row(k);
            let brow = other.row(k);
            for i in 0..self.cols {
                let a = arow[i].conj();
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(brow.iter()) {
                    *d += a * *s;
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v.iter())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, x)| acc + *a * *x)
            })
            .collect()
    }

    /// `selfᴴ * v`.
    pub fn adjoint_mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.rows, v.len(), "adjoint matvec shape mismatch");
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.cols];
        for r in 0..self.rows {
            let x = v[r];
            for (o, a) in out.iter_mut().zip(self.row(r).iter()) {
                *o += a.conj() * x;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(other.data.iter()) {
            *d += *s;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(other.data.iter()) {
            *d -= *s;
        }
        out
    }

    pub fn scale(&self, factor: T) -> Self {
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            *d = d.scale(factor);
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Max deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> T {
        assert!(self.is_square());
        let mut dev = T::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self[(r, c)] - self[(c, r)].conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    /// Hermitian within `tol * max_abs` (absolute `tol` when the matrix is zero).
    pub fn is_hermitian(&self, tol: T) -> bool {
        let scale = self.max_abs().max(T::one());
        self.hermiticity_deviation() <= tol * scale
    }

    /// Force exact Hermiticity by averaging with the conjugate transpose.
    pub fn hermitize(&self) -> Self {
        assert!(self.is_square());
        let half = T::real(0.5);
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()).scale(half)
        })
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Conjugating inner product `<a|b>`.
pub fn dot<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * *y
        })
}

/// Euclidean norm.
pub fn norm<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// `a - b` elementwise.
pub fn vec_sub<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().zip(b.iter()).map(|(x, y)| *x - *y).collect()
}

/// Rank-one expectation `<v| m |v>`.
pub fn quadratic_form<T: Scalar>(m: &CMatrix<T>, v: &[Complex<T>]) -> Complex<T> {
    dot(v, &m.mul_vec(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn matmul_and_adjoint_agree_with_hand_computation() {
        let a = CMatrix::from_fn(2, 3, |r, c_| c((r * 3 + c_) as f64, 1.0));
        let b = CMatrix::from_fn(3, 2, |r, c_| c(1.0, (r + c_) as f64));
        let ab = a.mul(&b);
        // row 0 of a: (0+i, 1+i, 2+i); col 0 of b: (1, 1+i, 1+2i)
        let expect00 = c(0.0, 1.0) * c(1.0, 0.0) + c(1.0, 1.0) * c(1.0, 1.0) + c(2.0, 1.0) * c(1.0, 2.0);
        assert!((ab[(0, 0)] - expect00).norm() < 1e-14);

        let viaadj = a.adjoint().adjoint_mul(&b);
        for r in 0..2 {
            for cc in 0..2 {
                assert!((viaadj[(r, cc)] - ab[(r, cc)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn hermitize_is_idempotent_and_detects_deviation() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 2.0);
        m[(1, 0)] = c(1.0, -2.0 + 1e-3);
        assert!(!m.is_hermitian(1e-6));
        let h = m.hermitize();
        assert!(h.is_hermitian(1e-15));
        assert_eq!(h.hermitize(), h);
    }

    #[test]
    fn dot_conjugates_first_argument() {
        let a = vec![c(0.0, 1.0)];
        let b = vec![c(0.0, 1.0)];
        assert!((dot(&a, &b) - c(1.0, 0.0)).norm() < 1e-15);
    }
}
