//! Scalar abstraction: the numeric kernels are generic over the real field.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::float::FloatConst;
use num_traits::{Float, NumAssign};

/// Real scalar type the library is generic over: `f32` or `f64`.
///
/// All tolerance constants in this crate are quoted for `f64`; the `f32`
/// instantiation is provided for callers that can live with the reduced
/// precision, not for the acceptance-grade checks.
pub trait Scalar:
    Float + FloatConst + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for tolerances and literals.
    fn real(x: f64) -> Self {
        Self::from(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64`, used when reporting.
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}
