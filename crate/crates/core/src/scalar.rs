use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumCast};

/// Floating-point scalar the whole library is generic over: `f32` or `f64`.
///
/// Everything downstream of the polynomial layer only needs `Float`
/// arithmetic plus casts from literal constants, so the trait is a thin
/// alias with one convenience constructor.
pub trait Scalar:
    Float + FloatConst + NumCast + Debug + Display + Send + Sync + 'static
{
    /// Cast a literal `f64` into the scalar type.
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("literal representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + NumCast + Debug + Display + Send + Sync + 'static
{
}
