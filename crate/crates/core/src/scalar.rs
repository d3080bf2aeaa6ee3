//! Scalar abstraction for the dense linear-algebra core.
//!
//! Matrix storage, the eigensolver and the approximation measures are
//! generic over [`Scalar`] so the same code runs at `f32` or `f64`
//! precision. The pipeline modules fix `f64` through the aliases at the
//! crate root.

use num_traits::Float;

pub trait Scalar:
    Float + num_traits::NumAssign + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Conversion from `f64`, used to inject tolerances and literals.
    fn from_f64(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }

    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }
}
