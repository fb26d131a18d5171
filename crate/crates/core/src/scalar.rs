//! Scalar abstraction shared by every module.
//!
//! All geometry and linear algebra in this crate is written against [`Real`],
//! which is implemented for `f32` and `f64`. Tolerances are expressed as `f64`
//! literals and lifted through [`Real::tol`], which never returns a value below
//! a small multiple of the type's machine epsilon.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` constant into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// A tolerance of `x`, floored at `64 * epsilon` so that `f64`-calibrated
    /// thresholds stay meaningful for `f32`.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Lossy conversion used for error payloads and reports.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

/// Reduces an angle to the half-open interval `(-π, π]`.
pub fn reduce_angle<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let mut r = theta - two_pi * (theta / two_pi).round();
    if r <= -T::PI() {
        r += two_pi;
    } else if r > T::PI() {
        r -= two_pi;
    }
    r
}

/// `asin` with the argument clamped to `[-1, 1]`.
#[inline]
pub fn asin_clamped<T: Real>(x: T) -> T {
    x.max(-T::one()).min(T::one()).asin()
}
