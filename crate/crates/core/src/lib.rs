//! Ground-state energy estimation with real-time Krylov subspaces under
//! matrix-element noise.
//!
//! The crate builds spin-lattice Hamiltonians, assembles the Krylov matrix
//! pair from exact or product-formula time evolution, perturbs it with a
//! seeded Gaussian noise model, solves the threshold-regularized generalized
//! eigenvalue problem, and evaluates closed-form lower/upper bounds on the
//! signed energy error. The `experiments` module drives full noise/dimension
//! sweeps with CSV and SVG output.
//!
//! Numeric kernels are generic over the real scalar (`f32` or `f64`) through
//! [`scalar::Scalar`]; the aliases at the crate root pin the `f64`
//! instantiation that the experiment driver and CLI use.

pub mod error;
pub mod linalg;
pub mod scalar;

pub mod bounds;
pub mod effective;
pub mod experiments;
pub mod krylov;
pub mod noise;
pub mod operators;
pub mod solver;
pub mod testing;

pub use error::{Error, Result};

/// Dense complex matrix at working precision.
pub type Matrix = linalg::CMatrix<f64>;
/// Hermitian operator at working precision.
pub type Operator = operators::HermitianOperator<f64>;
/// Normalized state vector at working precision.
pub type State = operators::StateVector<f64>;
/// Spectral decomposition at working precision.
pub type Spectrum = operators::SpectralDecomposition<f64>;
/// Derived spectral quantities at working precision.
pub type Quantities = operators::SpectralQuantities<f64>;
/// Krylov matrix pair at working precision.
pub type Pencil = krylov::KrylovPencil<f64>;
/// Explicit Krylov basis at working precision.
pub type Basis = krylov::KrylovBasis<f64>;
/// Noisy Krylov matrix pair at working precision.
pub type Noisy = noise::NoisyPencil<f64>;
/// Bound evaluation inputs at working precision.
pub type Inputs = bounds::BoundInputs<f64>;
