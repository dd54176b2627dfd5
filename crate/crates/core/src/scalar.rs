//! Scalar abstraction shared by every module.
//!
//! The numerical core is written once against [`Scalar`] and instantiated for
//! `f64` (the default used by the CLI and all tolerances) and `f32`.

use std::fmt;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point type usable by the invariant machinery.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive + fmt::LowerExp {}

impl<T> Scalar for T where T: RealField + Copy + FromPrimitive + ToPrimitive + fmt::LowerExp {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Widens a scalar to `f64` for reporting and tolerance checks.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `tol` raised to a small multiple of the machine epsilon of `T`.
#[inline]
pub fn floor_tol<T: Scalar>(tol: f64) -> f64 {
    tol.max(64.0 * to_f64(T::default_epsilon()))
}
