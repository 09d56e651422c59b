//! Scalar abstraction: every numerical routine in this crate is generic over
//! a floating-point type implementing [`Scalar`].

use std::fmt::{Debug, Display, LowerExp};

/// Floating-point scalar usable throughout the library (`f32` or `f64`).
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("constant not representable in scalar type")
}

/// Half of `x`.
#[inline]
pub(crate) fn half<S: Scalar>(x: S) -> S {
    x / real::<S>(2.0)
}
