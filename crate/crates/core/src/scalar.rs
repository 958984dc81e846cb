//! Floating-point abstraction used throughout the crate.
//!
//! All solvers are generic over [`Scalar`] so the same code runs in `f32`
//! and `f64`. Tolerances that encode "this identity holds exactly up to
//! rounding" scale with the type, hence the associated methods instead of
//! hard-coded literals.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::float::{Float, FloatConst};
use num_traits::{FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; panics if the value is not representable.
    #[inline]
    fn cast(v: f64) -> Self {
        Self::from_f64(v).expect("literal not representable in scalar type")
    }

    /// Lossy view as `f64`, for reporting and error messages.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for identities expected to hold up to rounding
    /// (periodicity of a closed-form potential, oddness of a force, ...).
    fn identity_tol() -> Self;

    /// Tolerance for consistency checks contaminated by one subtraction
    /// per sample (uniform grid spacing, closure bookkeeping, ...).
    fn bookkeeping_tol() -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn identity_tol() -> Self {
        1e-12
    }
    #[inline]
    fn bookkeeping_tol() -> Self {
        1e-10
    }
}

impl Scalar for f32 {
    #[inline]
    fn identity_tol() -> Self {
        1e-5
    }
    #[inline]
    fn bookkeeping_tol() -> Self {
        1e-4
    }
}
