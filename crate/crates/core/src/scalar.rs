//! Sample scalar abstraction for the numeric core.
//!
//! The DSP layer is generic over the floating-point type so it can run at
//! `f32` (memory-bound batch work) or `f64` (the default pipeline precision,
//! see [`crate::Sample`]). Everything the signal code needs is collected into
//! one bound.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the signal-processing core is generic over.
///
/// Implemented for `f32` and `f64`. `FftNum` brings `Signed` into scope,
/// whose `abs`/`signum` collide with the `Float` methods of the same name;
/// use [`Scalar::fabs`] in generic code to stay unambiguous.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + FftNum + Debug + Display + 'static
{
    /// `Float::abs`, disambiguated from `Signed::abs`.
    #[inline]
    fn fabs(self) -> Self {
        Float::abs(self)
    }

    /// Lossy conversion from a count; counts in this crate stay far below
    /// the 24-bit mantissa limit that would make `f32` inexact.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as scalar")
    }

    #[inline]
    fn from_f64c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable as scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
