//! Scalar abstraction shared by the whole crate.
//!
//! All numerics are generic over a real scalar so the same code runs in
//! `f32` or `f64`; the concrete aliases at the crate root pin `f64`, which
//! is what every quoted tolerance assumes.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Real scalar the toolkit is generic over.
pub trait Real:
    Float
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for converting an `f64` literal into the working scalar.
#[inline]
pub fn fl<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// Complex number over the working scalar.
pub type C<T> = Complex<T>;

/// Complex zero.
#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Complex one.
#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// Purely imaginary unit.
#[inline]
pub fn ci<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// Complex from real part.
#[inline]
pub fn cre<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Maximum of two scalars (total order on non-NaN inputs).
#[inline]
pub fn smax<T: Real>(a: T, b: T) -> T {
    if a > b {
        a
    } else {
        b
    }
}

/// Minimum of two scalars.
#[inline]
pub fn smin<T: Real>(a: T, b: T) -> T {
    if a < b {
        a
    } else {
        b
    }
}
